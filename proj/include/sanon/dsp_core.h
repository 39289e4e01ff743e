// Copyright (c) 2026 The sanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SANON_DSP_CORE_H_
#define SANON_DSP_CORE_H_

#include <complex>
#include <span>
#include <vector>

#include "sanon/audio_io.h"

namespace sanon {

enum class WindowType { kRectangular, kHann };

// Hann is sampled at bin centres, w[n] = sin^2(pi (n + 0.5) / N). It never
// reaches zero and sums to a constant at any hop that divides N / 2.
std::vector<double> MakeWindow(WindowType type, int length);

struct FrameSequence {
  std::vector<std::vector<double>> frames;
  int frame_len = 0;
  int hop_len = 0;
  WindowType window = WindowType::kHann;
  size_t signal_length = 0;  // samples in the framed signal
  int sample_rate_hz = kWorkingRateHz;
};

// Frame i covers samples [i * hop, i * hop + frame_len); there are
// ceil(len / hop) frames and the tail is zero-padded.
FrameSequence FrameSignal(const AudioBuffer& buffer, double frame_ms,
                          double hop_ms, WindowType window);

// Overlap-adds the frames and divides by the accumulated window, which is the
// constant COLA gain away from the signal edges. Throws kConfiguration if the
// window/hop pair does not overlap-add to a constant.
AudioBuffer OverlapAdd(const FrameSequence& frames);

// A(z) = 1 - sum_k coefficients[k-1] z^-k.
struct LpcModel {
  std::vector<double> coefficients;
  double gain = 0.0;  // sqrt of the prediction error energy

  int order() const { return static_cast<int>(coefficients.size()); }
};

struct PoleSet {
  std::vector<std::complex<double>> poles;
  double gain = 0.0;
};

struct LpcOptions {
  // Gaussian lag window applied to the autocorrelation; 0 disables it.
  double lag_window_bandwidth_hz = 60.0;
  int sample_rate_hz = kWorkingRateHz;
};

// |Im| at or below this is treated as a real pole.
inline constexpr double kRealPoleEpsilon = 1e-8;

std::vector<double> Autocorrelation(std::span<const double> frame,
                                    int max_lag);

// Levinson-Durbin on the (lag-windowed) autocorrelation of `frame`.
// Throws kDegenerateFrame when the frame has no energy and kNumerical if a
// reflection coefficient reaches the unit circle.
LpcModel LpcFromFrame(std::span<const double> frame, int order,
                      const LpcOptions& options = {});
LpcModel LevinsonDurbin(std::span<const double> autocorr, int order);

// Roots of z^p - a1 z^(p-1) - ... - ap, cleaned so that non-real poles come
// in exact conjugate pairs.
PoleSet LpcToPoles(const LpcModel& model);
// Throws kValidation if a non-real pole has no conjugate partner.
LpcModel PolesToLpc(const PoleSet& poles);

// Step-down recursion. The model is minimum-phase iff every |k| < 1.
std::vector<double> ReflectionCoefficients(const LpcModel& model);
bool IsMinimumPhase(const LpcModel& model);

// Past samples, most recent first. Inverse filtering keeps past inputs,
// synthesis keeps past outputs. Missing history reads as zero.
struct FilterState {
  std::vector<double> history;
};

// e[n] = x[n] - sum_k a[k] x[n-k]
std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model, FilterState* state);
// y[n] = e[n] + sum_k a[k] y[n-k]; throws kStability unless minimum-phase.
std::vector<double> SynthesisFilter(std::span<const double> excitation,
                                    const LpcModel& model, FilterState* state);

}  // namespace sanon

#endif  // SANON_DSP_CORE_H_
