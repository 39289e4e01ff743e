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

#include "synth.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace sanon::testing {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kFormants = 4;
using Formants = std::array<double, kFormants>;

// Adult male reference formants for five vowels.
constexpr std::array<Formants, 5> kVowels = {{
    {730, 1090, 2440, 3400},  // a
    {270, 2290, 3010, 3700},  // i
    {300, 870, 2240, 3300},   // u
    {530, 1840, 2480, 3500},  // e
    {570, 840, 2410, 3350},   // o
}};
constexpr Formants kBandwidths = {80, 100, 130, 170};

// Two-pole resonator with unity gain at DC.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double Step(double x, double freq, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double c = 2.0 * r * std::cos(kTwoPi * freq / fs);
    const double g = 1.0 - c + r * r;
    const double y = g * x + c * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Segment {
  Formants formants;
  double start_s, end_s;  // voiced span
};

AudioBuffer Render(const std::vector<Segment>& segments, double seconds,
                   const SyntheticSpeaker& speaker, double f0_scale,
                   double vibrato_hz, double vibrato_depth, uint64_t seed,
                   double declination = 0.06) {
  const double fs = kWorkingRateHz;
  const size_t n = static_cast<size_t>(std::llround(seconds * fs));
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::array<Resonator, kFormants> tract;
  AudioBuffer out;
  out.samples.assign(n, 0.0);
  double phase = 0.0;
  size_t seg = 0;
  std::vector<double> tilt(128);
  for (size_t k = 1; k < tilt.size(); ++k) {
    tilt[k] = std::pow(static_cast<double>(k), -speaker.spectral_tilt);
  }
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    while (seg + 1 < segments.size() && t >= segments[seg + 1].start_s) ++seg;
    const Segment& s = segments[seg];
    const Segment& next = segments[std::min(seg + 1, segments.size() - 1)];
    // Amplitude: raised-cosine ramps of 25 ms at both ends of the voiced span.
    double amp = 0.0;
    if (t >= s.start_s && t < s.end_s) {
      const double ramp = 0.025;
      const double a = std::min({1.0, (t - s.start_s) / ramp, (s.end_s - t) / ramp});
      amp = 0.5 - 0.5 * std::cos(std::numbers::pi * a);
    }
    // Formants glide toward the next target during the last 40% of the span.
    const double span = s.end_s - s.start_s;
    const double glide = std::clamp((t - (s.start_s + 0.6 * span)) / (0.4 * span + 1e-9), 0.0, 1.0);
    const double f0 = speaker.f0_hz * f0_scale *
                      (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_hz * t)) *
                      (1.0 - declination * (t / seconds));
    phase += kTwoPi * f0 / fs;
    if (phase > kTwoPi) phase -= kTwoPi;
    double source = 0.0;
    if (amp > 0.0) {
      // cos(k phase) by the Chebyshev recurrence.
      const double c1 = std::cos(phase);
      double prev = 1.0, cur = c1;
      for (int k = 1; k * f0 < 3800.0; ++k) {
        source += tilt[k] * cur;
        const double next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
      }
      source = amp * source + amp * speaker.breathiness * noise(gen);
    }
    source += 1e-4 * noise(gen);
    double y = source;
    for (int f = 0; f < kFormants; ++f) {
      const double target = (1.0 - glide) * s.formants[f] + glide * next.formants[f];
      y = tract[f].Step(y, target * speaker.formant_scale, kBandwidths[f], fs);
    }
    out.samples[i] = y;
  }
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out.samples) v *= 0.5 / peak;
  }
  return out;
}

}  // namespace

std::vector<SyntheticSpeaker> MakeSpeakers(int count, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SyntheticSpeaker> speakers;
  for (int i = 0; i < count; ++i) {
    SyntheticSpeaker s;
    s.id = fmt::format("spk{:02d}", i);
    // Spread f0 and tract length over the adult range, with jitter so that
    // neighbouring speakers are not exactly evenly spaced.
    const double pos = (i + 0.2 + 0.6 * u(gen)) / count;
    s.f0_hz = 95.0 * std::pow(240.0 / 95.0, pos);
    s.formant_scale = 0.88 + 0.32 * std::fmod(pos * 3.7 + u(gen) * 0.2, 1.0);
    s.spectral_tilt = 0.8 + 0.6 * u(gen);
    s.breathiness = 0.005 + 0.03 * u(gen);
    speakers.push_back(s);
  }
  return speakers;
}

AudioBuffer SynthesizeUtterance(const SyntheticSpeaker& speaker,
                                double seconds, uint64_t seed) {
  std::mt19937_64 gen(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Segment> segments;
  double t = 0.05 + 0.05 * u(gen);
  while (t < seconds - 0.1) {
    const double len = std::min(0.18 + 0.15 * u(gen), seconds - 0.05 - t);
    if (len < 0.08) break;
    segments.push_back({kVowels[gen() % kVowels.size()], t, t + len});
    t += len + (u(gen) < 0.3 ? 0.04 + 0.06 * u(gen) : 0.0);
  }
  if (segments.empty()) segments.push_back({kVowels[0], 0.0, seconds});
  const double f0_scale = 1.0 + 0.04 * (u(gen) - 0.5);
  return Render(segments, seconds, speaker, f0_scale, 0.5 + 2.0 * u(gen),
                0.04 + 0.03 * u(gen), gen());
}

AudioBuffer SynthesizeSustainedVowel(double f0_hz, double seconds,
                                     double formant_scale) {
  SyntheticSpeaker speaker;
  speaker.f0_hz = f0_hz;
  speaker.formant_scale = formant_scale;
  speaker.breathiness = 0.0;
  return Render({{kVowels[0], 0.0, 1e9}}, seconds, speaker, 1.0, 1.0, 0.0, 7,
                /*declination=*/0.0);
}

AudioBuffer SineTone(double freq_hz, double seconds, double amplitude) {
  AudioBuffer out;
  const size_t n = static_cast<size_t>(std::llround(seconds * kWorkingRateHz));
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.samples[i] =
        amplitude * std::sin(kTwoPi * freq_hz * i / kWorkingRateHz);
  }
  return out;
}

std::vector<double> ArProcess(std::span<const double> a, size_t length,
                              uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const size_t warmup = 2000;
  std::vector<double> y(length + warmup, 0.0);
  for (size_t i = 0; i < y.size(); ++i) {
    double v = noise(gen);
    for (size_t k = 0; k < a.size() && k < i; ++k) v += a[k] * y[i - 1 - k];
    y[i] = v;
  }
  return {y.begin() + warmup, y.end()};
}

std::filesystem::path WriteSyntheticDataset(
    const std::filesystem::path& dir,
    const std::vector<SyntheticSpeaker>& speakers, int utts_per_speaker,
    double seconds, uint64_t seed) {
  std::vector<UtteranceRecord> records;
  for (const auto& speaker : speakers) {
    for (int u = 0; u < utts_per_speaker; ++u) {
      UtteranceRecord rec;
      rec.speaker_id = speaker.id;
      rec.utt_id = fmt::format("{}_u{:03d}", speaker.id, u);
      rec.audio_path = fmt::format("wav/{}/{}.wav", speaker.id, rec.utt_id);
      std::filesystem::create_directories(dir / "wav" / speaker.id);
      const uint64_t utt_seed =
          seed * 0x9E3779B97F4A7C15ULL + records.size() * 7919 + 1;
      WriteWav(SynthesizeUtterance(speaker, seconds, utt_seed),
               dir / rec.audio_path);
      records.push_back(std::move(rec));
    }
  }
  const auto manifest = dir / "manifest.csv";
  WriteManifest(records, manifest);
  return manifest;
}

std::filesystem::path MakeTempDir(const std::string& label) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   fmt::format("sanon_{}_{}_{}", label, rd(), counter++);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sanon::testing
