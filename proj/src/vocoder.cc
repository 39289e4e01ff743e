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

#include "sanon/vocoder.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sanon/error.h"
#include "sanon/random.h"

namespace sanon {

namespace {

constexpr double kSilenceRms = 1e-5;
constexpr double kYinAbsoluteThreshold = 0.1;

struct RawPitch {
  double f0_hz = 0.0;
  bool voiced = false;
};

// Cumulative-mean-normalized difference on one analysis window.
RawPitch YinFrame(const std::vector<double>& x, int tau_min, int tau_max,
                  double threshold, int sample_rate) {
  const int width = static_cast<int>(x.size()) - tau_max;
  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (std::sqrt(energy / x.size()) < kSilenceRms) return {};

  // d(tau) = e0 + e_tau - 2 r(tau), accumulated with tau innermost so the
  // loop vectorizes without reassociation.
  std::vector<double> corr(tau_max + 1, 0.0);
  for (int j = 0; j < width; ++j) {
    const double xj = x[j];
    const double* shifted = x.data() + j;
    for (int tau = 1; tau <= tau_max; ++tau) corr[tau] += xj * shifted[tau];
  }
  double e0 = 0.0;
  for (int j = 0; j < width; ++j) e0 += x[j] * x[j];
  std::vector<double> d(tau_max + 1, 0.0);
  double etau = e0;
  for (int tau = 1; tau <= tau_max; ++tau) {
    etau += x[width + tau - 1] * x[width + tau - 1] - x[tau - 1] * x[tau - 1];
    d[tau] = std::max(0.0, e0 + etau - 2.0 * corr[tau]);
  }

  std::vector<double> cmnd(tau_max + 1, 1.0);
  double running = 0.0;
  for (int tau = 1; tau <= tau_max; ++tau) {
    running += d[tau];
    cmnd[tau] = running > 0.0 ? d[tau] * tau / running : 1.0;
  }

  // Period: the first dip under the absolute threshold, else the global
  // minimum. Voicing: the dip depth against `threshold`.
  int best = -1;
  for (int tau = tau_min; tau <= tau_max; ++tau) {
    if (cmnd[tau] < kYinAbsoluteThreshold) {
      while (tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
      best = tau;
      break;
    }
  }
  if (best < 0) {
    best = static_cast<int>(
        std::min_element(cmnd.begin() + tau_min, cmnd.begin() + tau_max + 1) -
        cmnd.begin());
  }
  if (!(cmnd[best] < threshold)) return {};

  double refined = best;
  if (best > 1 && best < tau_max) {
    const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) refined = best + 0.5 * (a - c) / denom;
  }
  const double f0 =
      std::clamp(sample_rate / refined, kMinF0Hz, kMaxF0Hz);
  return {f0, true};
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Band-limited unit impulse at fractional offset d from a sample.
double PulseKernel(double d, double half_width) {
  if (std::abs(d) >= half_width) return 0.0;
  const double sinc = std::abs(d) < 1e-12 ? 1.0 : std::sin(M_PI * d) / (M_PI * d);
  const double w = 0.5 + 0.5 * std::cos(M_PI * d / half_width);
  return sinc * w;
}

}  // namespace

F0Track EstimateF0(const AudioBuffer& buffer, const F0Options& options) {
  Require(buffer.sample_rate_hz == kWorkingRateHz,
          "EstimateF0: expects 16 kHz audio");
  const int fs = buffer.sample_rate_hz;
  const int hop = static_cast<int>(std::lround(options.hop_ms * fs / 1000.0));
  const int window =
      static_cast<int>(std::lround(options.window_ms * fs / 1000.0));
  const int centre_offset =
      static_cast<int>(std::lround(options.centre_offset_ms * fs / 1000.0));
  const int tau_min = static_cast<int>(std::ceil(fs / kMaxF0Hz));
  const int tau_max = static_cast<int>(std::floor(fs / kMinF0Hz));
  Require(window > tau_max + 1, "EstimateF0: window shorter than max period");

  F0Track track;
  track.hop_ms = options.hop_ms;
  const size_t count = (buffer.size() + hop - 1) / hop;
  std::vector<RawPitch> raw(count);
  std::vector<double> x(window);
  for (size_t i = 0; i < count; ++i) {
    const long start =
        static_cast<long>(i) * hop + centre_offset - window / 2;
    for (int n = 0; n < window; ++n) {
      const long idx = start + n;
      x[n] = idx >= 0 && idx < static_cast<long>(buffer.size())
                 ? buffer.samples[idx]
                 : 0.0;
    }
    raw[i] = YinFrame(x, tau_min, tau_max, options.threshold, fs);
  }

  // Median smoothing: majority vote on voicing, median of voiced f0.
  const int half = options.median_length / 2;
  track.values.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const size_t lo = i >= static_cast<size_t>(half) ? i - half : 0;
    const size_t hi = std::min(count - 1, i + half);
    std::vector<double> voiced_f0;
    for (size_t j = lo; j <= hi; ++j) {
      if (raw[j].voiced) voiced_f0.push_back(raw[j].f0_hz);
    }
    const size_t span = hi - lo + 1;
    if (2 * voiced_f0.size() > span) {
      track.values[i] = {Median(voiced_f0), true};
    }
  }
  return track;
}

F0ShiftResult ShiftF0(const F0Track& track, double semitones) {
  Require(std::isfinite(semitones), "ShiftF0: semitones must be finite");
  F0ShiftResult result;
  result.track = track;
  const double factor = std::exp2(semitones / 12.0);
  for (auto& v : result.track.values) {
    if (!v.voiced) continue;
    const double shifted = v.f0_hz * factor;
    v.f0_hz = std::clamp(shifted, kMinF0Hz, kMaxF0Hz);
    if (v.f0_hz != shifted) ++result.clamp_count;
  }
  return result;
}

VocoderParams Analyze(const AudioBuffer& buffer) {
  Require(buffer.sample_rate_hz == kWorkingRateHz,
          "Analyze: expects 16 kHz audio");
  Require(!buffer.empty(), "Analyze: empty buffer");
  VocoderParams params;
  params.sample_rate_hz = buffer.sample_rate_hz;
  params.f0 = EstimateF0(buffer);
  const FrameSequence frames =
      FrameSignal(buffer, params.frame_ms, params.hop_ms, WindowType::kHann);
  params.envelopes.resize(frames.frames.size());
  params.degenerate.assign(frames.frames.size(), false);
  for (size_t i = 0; i < frames.frames.size(); ++i) {
    try {
      params.envelopes[i] = LpcFromFrame(frames.frames[i], kVocoderLpcOrder);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateFrame &&
          e.kind() != ErrorKind::kNumerical) {
        throw;
      }
      params.envelopes[i].coefficients.assign(kVocoderLpcOrder, 0.0);
      params.envelopes[i].gain = 0.0;
      params.degenerate[i] = true;
    }
  }
  return params;
}

VocoderOutput Synthesize(const VocoderParams& params) {
  VocoderOutput result;
  result.audio.sample_rate_hz = params.sample_rate_hz;
  const size_t frames = params.frame_count();
  if (frames == 0) return result;
  if (params.f0.size() != frames || params.degenerate.size() != frames) {
    Fail(ErrorKind::kValidation,
         fmt::format("Synthesize: {} f0 frames / {} flags for {} envelopes",
                     params.f0.size(), params.degenerate.size(), frames));
  }
  const int fs = params.sample_rate_hz;
  const int hop = static_cast<int>(std::lround(params.hop_ms * fs / 1000.0));
  const int len = static_cast<int>(std::lround(params.frame_ms * fs / 1000.0));
  const int warmup = 2 * hop;
  const size_t total = (frames - 1) * hop + len;
  const double centre = 0.5 * len;

  // Per-sample voicing weight and f0, interpolated between frame centres.
  // Linear interpolation of the voicing flag crossfades pulse and noise over
  // one hop at every voicing transition.
  std::vector<double> excitation(total, 0.0);
  std::vector<double> voicing(total, 0.0), f0(total, 0.0);
  double last_f0 = 0.0;
  for (const auto& v : params.f0.values) {
    if (v.voiced) {
      last_f0 = v.f0_hz;
      break;
    }
  }
  for (size_t n = 0; n < total; ++n) {
    const double q = std::clamp((n - centre) / hop, 0.0,
                                static_cast<double>(frames - 1));
    const size_t i0 = static_cast<size_t>(q);
    const size_t i1 = std::min(i0 + 1, frames - 1);
    const double t = q - i0;
    const auto& a = params.f0.values[i0];
    const auto& b = params.f0.values[i1];
    voicing[n] = (1.0 - t) * (a.voiced ? 1.0 : 0.0) + t * (b.voiced ? 1.0 : 0.0);
    if (a.voiced && b.voiced) {
      f0[n] = (1.0 - t) * a.f0_hz + t * b.f0_hz;
    } else if (a.voiced) {
      f0[n] = a.f0_hz;
    } else if (b.voiced) {
      f0[n] = b.f0_hz;
    } else {
      f0[n] = last_f0;
    }
    if (f0[n] > 0.0) last_f0 = f0[n];
  }

  // Pitch-synchronous pulses, placed at fractional positions so the period
  // is not quantized to whole samples. Each pulse carries sqrt(period) so
  // the train has unit power.
  constexpr double kPulseHalfWidth = 8.0;
  std::vector<double> pulses(total, 0.0);
  double phase = 0.0;
  for (size_t n = 0; n < total; ++n) {
    if (f0[n] <= 0.0) continue;
    const double inc = f0[n] / fs;
    const double next = phase + inc;
    if (next >= 1.0) {
      const double at = static_cast<double>(n) - (next - 1.0) / inc;
      const double amp = std::sqrt(1.0 / inc);
      const long first = static_cast<long>(std::ceil(at - kPulseHalfWidth));
      const long last = static_cast<long>(std::floor(at + kPulseHalfWidth));
      for (long m = std::max(0L, first);
           m <= std::min<long>(last, static_cast<long>(total) - 1); ++m) {
        pulses[m] += amp * PulseKernel(m - at, kPulseHalfWidth);
      }
      phase = next - 1.0;
    } else {
      phase = next;
    }
  }

  Rng rng(params.noise_seed);
  for (size_t n = 0; n < total; ++n) {
    const double noise = rng.Gaussian();
    excitation[n] = voicing[n] * pulses[n] + (1.0 - voicing[n]) * noise;
  }

  const auto window = MakeWindow(WindowType::kHann, len);
  double window_energy = 0.0;
  for (double w : window) window_energy += w * w;

  std::vector<double> acc(total, 0.0), norm(total, 0.0);
  std::vector<double> segment;
  for (size_t i = 0; i < frames; ++i) {
    const size_t start = i * hop;
    for (int n = 0; n < len; ++n) norm[start + n] += window[n];
    if (params.degenerate[i]) continue;
    const LpcModel& env = params.envelopes[i];
    if (!IsMinimumPhase(env)) {
      ++result.bypassed_frames;
      continue;
    }
    // Residual RMS of the analysed frame, undoing the analysis window.
    const double scale = env.gain / std::sqrt(window_energy);
    const size_t from = start >= static_cast<size_t>(warmup) ? start - warmup : 0;
    segment.assign(excitation.begin() + from, excitation.begin() + start + len);
    for (double& s : segment) s *= scale;
    FilterState state;
    const auto shaped = SynthesisFilter(segment, env, &state);
    const size_t offset = start - from;
    for (int n = 0; n < len; ++n) {
      acc[start + n] += window[n] * shaped[offset + n];
    }
  }

  const size_t out_len = frames * hop;
  result.audio.samples.resize(out_len);
  for (size_t n = 0; n < out_len; ++n) {
    result.audio.samples[n] = norm[n] > 1e-12 ? acc[n] / norm[n] : 0.0;
  }
  return result;
}

}  // namespace sanon
