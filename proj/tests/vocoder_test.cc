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
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sanon/anonymizers.h"
#include "sanon/fft.h"
#include "support/expect_error.h"
#include "support/oracles.h"
#include "support/synth.h"

namespace sanon {
namespace {

AudioBuffer Noise(double seconds, uint64_t seed, double sigma = 0.1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, sigma);
  AudioBuffer b;
  b.samples.resize(static_cast<size_t>(seconds * kWorkingRateHz));
  for (auto& v : b.samples) v = g(gen);
  return b;
}

// Interior frames are those whose analysis window lies inside the signal.
std::vector<F0Frame> Interior(const F0Track& track, size_t margin = 10) {
  if (track.size() <= 2 * margin) return {};
  return {track.values.begin() + margin, track.values.end() - margin};
}

TEST(EstimateF0Test, PureSineIsVoicedAtItsFrequency) {
  const auto frames = Interior(EstimateF0(testing::SineTone(220.0, 1.0)));
  size_t good = 0;
  for (const auto& f : frames) good += f.voiced && std::abs(f.f0_hz - 220.0) <= 2.0;
  EXPECT_GE(good, 0.9 * frames.size());
}

TEST(EstimateF0Test, WhiteNoiseIsMostlyUnvoiced) {
  const F0Track track = EstimateF0(Noise(1.0, 3));
  size_t unvoiced = 0;
  for (const auto& f : track.values) unvoiced += !f.voiced;
  EXPECT_GE(unvoiced, 0.9 * track.size());
}

TEST(EstimateF0Test, SilenceIsUnvoicedWithZeroF0) {
  AudioBuffer silence{std::vector<double>(8000, 0.0), kWorkingRateHz};
  const F0Track track = EstimateF0(silence);
  EXPECT_EQ(track.size(), 8000u / 80);
  for (const auto& f : track.values) {
    EXPECT_FALSE(f.voiced);
    EXPECT_EQ(f.f0_hz, 0.0);
  }
}

TEST(EstimateF0Test, HarmonicRichVowelsAcrossTheRange) {
  // Formant-shaped sources must not lock onto a partial.
  for (double f0 : {80.0, 110.0, 150.0, 200.0, 260.0, 330.0}) {
    const auto frames =
        Interior(EstimateF0(testing::SynthesizeSustainedVowel(f0, 0.6)));
    size_t good = 0;
    for (const auto& f : frames) {
      good += f.voiced && std::abs(f.f0_hz / f0 - 1.0) < 0.01;
    }
    EXPECT_GE(good, 0.9 * frames.size()) << f0;
  }
}

TEST(EstimateF0Test, RejectsOtherRates) {
  AudioBuffer b{std::vector<double>(800, 0.0), 8000};
  EXPECT_SANON_ERROR(EstimateF0(b), ErrorKind::kPrecondition);
}

TEST(ShiftF0Test, ClosedFormExamples) {
  F0Track track;
  track.values = {{200.0, true}, {0.0, false}};
  EXPECT_NEAR(ShiftF0(track, 12.0).track.values[0].f0_hz, 400.0, 1e-12);
  EXPECT_NEAR(ShiftF0(track, 3.0).track.values[0].f0_hz, 237.84, 0.005);
  EXPECT_EQ(ShiftF0(track, 0.0).track, track);
  EXPECT_FALSE(ShiftF0(track, 3.0).track.values[1].voiced);
  EXPECT_EQ(ShiftF0(track, 3.0).track.values[1].f0_hz, 0.0);
}

TEST(ShiftF0Test, OppositeShiftRestoresTrack) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> f(80.0, 300.0), s(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    F0Track track;
    for (int i = 0; i < 20; ++i) track.values.push_back({f(gen), i % 3 != 0});
    for (auto& v : track.values) {
      if (!v.voiced) v.f0_hz = 0.0;
    }
    const double semitones = s(gen);
    const auto up = ShiftF0(track, semitones);
    const auto back = ShiftF0(up.track, -semitones);
    EXPECT_EQ(up.clamp_count + back.clamp_count, 0u);
    for (size_t i = 0; i < track.size(); ++i) {
      EXPECT_EQ(back.track.values[i].voiced, track.values[i].voiced);
      EXPECT_NEAR(back.track.values[i].f0_hz, track.values[i].f0_hz,
                  1e-12 * track.values[i].f0_hz);
    }
  }
}

TEST(ShiftF0Test, ClampsOutOfRangeAndCounts) {
  F0Track track;
  track.values = {{450.0, true}, {65.0, true}, {200.0, true}};
  const auto up = ShiftF0(track, 5.0);
  EXPECT_EQ(up.track.values[0].f0_hz, kMaxF0Hz);
  EXPECT_EQ(up.clamp_count, 1u);
  const auto down = ShiftF0(track, -5.0);
  EXPECT_EQ(down.track.values[1].f0_hz, kMinF0Hz);
  EXPECT_EQ(down.clamp_count, 1u);
}

TEST(AnalyzeTest, EnvelopePeakMatchesArResonance) {
  // AR(2) resonance at 1000 Hz with pole radius 0.97.
  const double r = 0.97, theta = 2 * std::numbers::pi * 1000.0 / kWorkingRateHz;
  const std::vector<double> a = {2 * r * std::cos(theta), -r * r};
  AudioBuffer b{testing::ArProcess(a, 16000, 9), kWorkingRateHz};
  for (auto& v : b.samples) v *= 0.01;
  const VocoderParams params = Analyze(b);
  ASSERT_GT(params.frame_count(), 100u);
  const LpcModel& m = params.envelopes[params.frame_count() / 2];
  ASSERT_EQ(m.order(), kVocoderLpcOrder);
  double best_hz = 0.0, best = -1.0;
  for (double hz = 50.0; hz < 7950.0; hz += 1.0) {
    const double w = 2 * std::numbers::pi * hz / kWorkingRateHz;
    std::complex<double> den = 1.0;
    for (int k = 0; k < m.order(); ++k) {
      den -= m.coefficients[k] * std::polar(1.0, -w * (k + 1));
    }
    const double mag = 1.0 / std::abs(den);
    if (mag > best) {
      best = mag;
      best_hz = hz;
    }
  }
  EXPECT_NEAR(best_hz, 1000.0, 50.0);
}

TEST(AnalyzeTest, SilenceFlagsDegenerateFrames) {
  const VocoderParams p =
      Analyze(AudioBuffer{std::vector<double>(4000, 0.0), kWorkingRateHz});
  ASSERT_GT(p.frame_count(), 0u);
  for (size_t i = 0; i < p.frame_count(); ++i) {
    EXPECT_TRUE(p.degenerate[i]);
    EXPECT_FALSE(p.f0.values[i].voiced);
  }
}

TEST(AnalyzeTest, ShortBufferYieldsFrames) {
  const VocoderParams p = Analyze(testing::SineTone(200.0, 0.1));
  EXPECT_GE(p.frame_count(), 1u);
  EXPECT_EQ(p.f0.size(), p.frame_count());
  EXPECT_NO_THROW(Synthesize(p));
}

TEST(SynthesizeTest, RoundTripKeepsF0OfSine) {
  const VocoderOutput out = Synthesize(Analyze(testing::SineTone(220.0, 1.0)));
  const F0Track track = EstimateF0(out.audio);
  size_t voiced = 0, good = 0;
  for (const auto& f : Interior(track)) {
    if (!f.voiced) continue;
    ++voiced;
    good += std::abs(f.f0_hz - 220.0) <= 5.0;
  }
  ASSERT_GT(voiced, track.size() / 2);
  EXPECT_GE(good, 0.85 * voiced);
}

TEST(SynthesizeTest, UnvoicedFlatEnvelopeGivesFlatNoise) {
  VocoderParams p;
  const size_t frames = 400;  // 2 s
  p.noise_seed = 17;
  for (size_t i = 0; i < frames; ++i) {
    p.f0.values.push_back({0.0, false});
    p.envelopes.push_back(LpcModel{std::vector<double>(kVocoderLpcOrder, 0.0), 0.05});
    p.degenerate.push_back(false);
  }
  const AudioBuffer out = Synthesize(p).audio;
  ASSERT_GT(out.size(), 16000u);
  // Welch estimate: averaged 512-point periodograms, 250 Hz bands.
  RealFft fft(512);
  std::vector<double> psd(257, 0.0);
  for (size_t start = 0; start + 512 <= out.size(); start += 256) {
    std::vector<double> seg(out.samples.begin() + start,
                            out.samples.begin() + start + 512);
    for (int n = 0; n < 512; ++n) {
      seg[n] *= 0.5 - 0.5 * std::cos(2 * std::numbers::pi * n / 512);
    }
    const auto pw = fft.PowerSpectrum(seg);
    for (size_t k = 0; k < psd.size(); ++k) psd[k] += pw[k];
  }
  std::vector<double> bands_db;
  for (double lo = 300.0; lo + 250.0 <= 6000.0; lo += 250.0) {
    double acc = 0.0;
    int count = 0;
    for (size_t k = 0; k < psd.size(); ++k) {
      const double hz = k * 16000.0 / 512;
      if (hz >= lo && hz < lo + 250.0) {
        acc += psd[k];
        ++count;
      }
    }
    bands_db.push_back(10 * std::log10(acc / count));
  }
  double mean = 0.0;
  for (double d : bands_db) mean += d / bands_db.size();
  for (double d : bands_db) EXPECT_NEAR(d, mean, 6.0);
}

TEST(SynthesizeTest, EmptyParamsGiveEmptyAudio) {
  EXPECT_TRUE(Synthesize(VocoderParams{}).audio.empty());
}

TEST(SynthesizeTest, MismatchedParamsRejected) {
  VocoderParams p;
  p.envelopes.push_back(LpcModel{{}, 1.0});
  p.degenerate.push_back(false);
  EXPECT_SANON_ERROR(Synthesize(p), ErrorKind::kValidation);
}

TEST(SynthesizeTest, OutputFiniteAndBounded) {
  const auto speakers = testing::MakeSpeakers(6, 44);
  for (size_t i = 0; i < speakers.size(); ++i) {
    const AudioBuffer in = testing::SynthesizeUtterance(speakers[i], 1.0, i);
    const VocoderOutput out = Synthesize(Analyze(in));
    double peak = 0.0;
    for (double v : out.audio.samples) {
      ASSERT_TRUE(std::isfinite(v));
      peak = std::max(peak, std::abs(v));
    }
    EXPECT_LE(peak, 4.0);
  }
}

// Property: pitch shift measured with the library's own estimator, over
// random tones and shifts.
TEST(PitchShiftPropertyTest, EstimatedF0FollowsShift) {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> f(100.0, 300.0), s(-5.0, 5.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double f0 = f(gen), semitones = s(gen);
    const AudioBuffer tone = testing::SynthesizeSustainedVowel(f0, 0.8);
    const AudioBuffer out = ApplyPitchShift(tone, semitones, trial).output;
    const double target = f0 * std::exp2(semitones / 12.0);
    size_t voiced = 0, good = 0;
    for (const auto& v : Interior(EstimateF0(out))) {
      if (!v.voiced) continue;
      ++voiced;
      good += std::abs(v.f0_hz / target - 1.0) <= 0.01;
    }
    ASSERT_GT(voiced, 0u);
    EXPECT_GE(good, 0.85 * voiced) << f0 << " Hz " << semitones << " st";
  }
}

}  // namespace
}  // namespace sanon
