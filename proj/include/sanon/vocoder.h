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

#ifndef SANON_VOCODER_H_
#define SANON_VOCODER_H_

#include <cstdint>
#include <vector>

#include "sanon/audio_io.h"
#include "sanon/dsp_core.h"

namespace sanon {

// Pulse-plus-noise LPC vocoder. It stands in for a full WORLD-style
// analysis/synthesis chain: f0 can be modified independently of the spectral
// envelope, but there is no aperiodicity model and voiced frames are purely
// pulse-excited.

inline constexpr double kMinF0Hz = 60.0;
inline constexpr double kMaxF0Hz = 500.0;

struct F0Frame {
  double f0_hz = 0.0;  // 0 when unvoiced
  bool voiced = false;

  bool operator==(const F0Frame&) const = default;
};

struct F0Track {
  double hop_ms = 5.0;
  std::vector<F0Frame> values;

  size_t size() const { return values.size(); }
  bool operator==(const F0Track&) const = default;
};

struct F0Options {
  double hop_ms = 5.0;
  double window_ms = 40.0;
  // A lag is voiced when its cumulative-mean-normalized difference drops
  // below this value.
  double threshold = 0.3;
  int median_length = 5;
  // Frames centred this far into the signal line up with 25 ms analysis
  // frames starting at i * hop.
  double centre_offset_ms = 12.5;
};

// One estimate per hop; frame count is ceil(len / hop). Expects 16 kHz audio.
F0Track EstimateF0(const AudioBuffer& buffer, const F0Options& options = {});

struct F0ShiftResult {
  F0Track track;
  size_t clamp_count = 0;
};

// Scales voiced frames by 2^(semitones / 12), clamped to [60, 500] Hz.
F0ShiftResult ShiftF0(const F0Track& track, double semitones);

struct VocoderParams {
  F0Track f0;
  std::vector<LpcModel> envelopes;  // one per frame, order 24
  std::vector<bool> degenerate;     // silent frames carry no envelope
  double frame_ms = 25.0;
  double hop_ms = 5.0;
  int sample_rate_hz = kWorkingRateHz;
  uint64_t noise_seed = 0;

  size_t frame_count() const { return envelopes.size(); }
};

inline constexpr int kVocoderLpcOrder = 24;

VocoderParams Analyze(const AudioBuffer& buffer);

struct VocoderOutput {
  AudioBuffer audio;
  size_t bypassed_frames = 0;  // unstable envelopes
};

// Output length is frame_count * hop.
VocoderOutput Synthesize(const VocoderParams& params);

}  // namespace sanon

#endif  // SANON_VOCODER_H_
