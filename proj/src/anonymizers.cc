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

#include "sanon/anonymizers.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sanon/error.h"
#include "sanon/vocoder.h"

namespace sanon {

std::string_view MethodName(AnonymizationMethod method) {
  switch (method) {
    case AnonymizationMethod::kPitchShift: return "pitch_shift";
    case AnonymizationMethod::kMcAdams: return "mcadams";
    case AnonymizationMethod::kPoolAverage: return "pool_average";
    case AnonymizationMethod::kConstrainedSample: return "constrained_sample";
  }
  return "unknown";
}

AnonymizationMethod ParseMethod(std::string_view name) {
  for (auto m : {AnonymizationMethod::kPitchShift, AnonymizationMethod::kMcAdams,
                 AnonymizationMethod::kPoolAverage,
                 AnonymizationMethod::kConstrainedSample}) {
    if (MethodName(m) == name) return m;
  }
  Fail(ErrorKind::kValidation, fmt::format("unknown method '{}'", name));
}

bool IsWaveformMethod(AnonymizationMethod method) {
  return method == AnonymizationMethod::kPitchShift ||
         method == AnonymizationMethod::kMcAdams;
}

std::string_view ScopeName(RandomizationScope scope) {
  return scope == RandomizationScope::kPerSpeaker ? "per_speaker"
                                                  : "per_utterance";
}

RandomizationScope ParseScope(std::string_view name) {
  if (name == "per_speaker") return RandomizationScope::kPerSpeaker;
  if (name == "per_utterance") return RandomizationScope::kPerUtterance;
  Fail(ErrorKind::kValidation,
       fmt::format("unknown randomization scope '{}'", name));
}

RandomizationScope AnonymizerConfig::EffectiveScope() const {
  if (randomization_scope) return *randomization_scope;
  return method == AnonymizationMethod::kMcAdams
             ? RandomizationScope::kPerUtterance
             : RandomizationScope::kPerSpeaker;
}

void AnonymizerConfig::Validate() const {
  const auto bad = [](const std::string& what) {
    Fail(ErrorKind::kValidation, "config: " + what);
  };
  if (!(semitone_range.first > 0 &&
        semitone_range.first <= semitone_range.second)) {
    bad("semitone_range must satisfy 0 < lo <= hi");
  }
  if (!(mcadams_alpha_range.first > 0 &&
        mcadams_alpha_range.first <= mcadams_alpha_range.second &&
        mcadams_alpha_range.second <= 1.0)) {
    bad("mcadams_alpha_range must lie within (0, 1] with lo <= hi");
  }
  if (!(pool_average_m >= 1 && pool_average_m <= pool_farthest_k)) {
    bad("need 1 <= pool_average_m <= pool_farthest_k");
  }
  if (!(cosine_threshold > -1.0 && cosine_threshold < 1.0)) {
    bad("cosine_threshold must lie in (-1, 1)");
  }
}

uint64_t DerivedSeedFor(const AnonymizerConfig& cfg, const UtteranceKey& key) {
  const std::string_view scope_key =
      cfg.EffectiveScope() == RandomizationScope::kPerUtterance
          ? std::string_view(key.utt_id)
          : std::string_view();
  return DeriveSeed(cfg.seed, key.speaker_id, scope_key, MethodName(cfg.method));
}

Diagnostics& Diagnostics::operator+=(const Diagnostics& other) {
  bypassed_frames += other.bypassed_frames;
  numerical_failures += other.numerical_failures;
  unstable_frames += other.unstable_frames;
  clamp_count += other.clamp_count;
  clipped_samples += other.clipped_samples;
  return *this;
}

WaveformResult ApplyPitchShift(const AudioBuffer& buffer, double semitones,
                               uint64_t noise_seed) {
  VocoderParams params = Analyze(buffer);
  auto shifted = ShiftF0(params.f0, semitones);
  params.f0 = std::move(shifted.track);
  params.noise_seed = noise_seed;
  VocoderOutput synth = Synthesize(params);

  WaveformResult result;
  result.output = std::move(synth.audio);
  // Vocoder output covers whole hops; trim back to the input length.
  result.output.samples.resize(buffer.size(), 0.0);
  result.drawn.method = AnonymizationMethod::kPitchShift;
  result.drawn.semitones = semitones;
  result.drawn.noise_seed = noise_seed;
  result.diagnostics.clamp_count = shifted.clamp_count;
  result.diagnostics.unstable_frames = synth.bypassed_frames;
  result.diagnostics.bypassed_frames = static_cast<size_t>(
      std::count(params.degenerate.begin(), params.degenerate.end(), true));
  return result;
}

WaveformResult AnonymizePitchShift(const AudioBuffer& buffer,
                                   const AnonymizerConfig& cfg,
                                   const UtteranceKey& key) {
  cfg.Validate();
  Require(buffer.sample_rate_hz == kWorkingRateHz,
          "pitch shift expects 16 kHz audio");
  const uint64_t seed = DerivedSeedFor(cfg, key);
  Rng rng(seed);
  const double sign = rng.Uniform01() < 0.5 ? -1.0 : 1.0;
  const double magnitude =
      rng.Uniform(cfg.semitone_range.first, cfg.semitone_range.second);
  // Excitation noise always differs per utterance, whatever the scope.
  const uint64_t noise_seed =
      DeriveSeed(cfg.seed, key.speaker_id, key.utt_id, "pitch_shift_noise");
  WaveformResult result = ApplyPitchShift(buffer, sign * magnitude, noise_seed);
  result.drawn.derived_seed = seed;
  return result;
}

PoleSet McAdamsTransform(const PoleSet& poles, double alpha) {
  PoleSet out;
  out.gain = poles.gain;
  out.poles.reserve(poles.poles.size());
  for (const auto& z : poles.poles) {
    if (std::abs(z.imag()) <= kRealPoleEpsilon) {
      out.poles.push_back(z);
      continue;
    }
    const double phase = std::arg(z);
    const double warped = std::copysign(std::pow(std::abs(phase), alpha), phase);
    out.poles.push_back(std::polar(std::abs(z), warped));
  }
  return out;
}

WaveformResult ApplyMcAdams(const AudioBuffer& buffer, double alpha) {
  Require(buffer.sample_rate_hz == kWorkingRateHz,
          "McAdams expects 16 kHz audio");
  Require(alpha > 0.0 && alpha <= 1.0, "McAdams alpha must lie in (0, 1]");
  WaveformResult result;
  result.drawn.method = AnonymizationMethod::kMcAdams;
  result.drawn.alpha = alpha;

  FrameSequence frames =
      FrameSignal(buffer, kMcAdamsFrameMs, kMcAdamsHopMs, WindowType::kHann);
  for (auto& frame : frames.frames) {
    try {
      const LpcModel model = LpcFromFrame(frame, kMcAdamsLpcOrder);
      const LpcModel warped =
          PolesToLpc(McAdamsTransform(LpcToPoles(model), alpha));
      FilterState analysis, synthesis;
      const auto residual = InverseFilter(frame, model, &analysis);
      frame = SynthesisFilter(residual, warped, &synthesis);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::kDegenerateFrame:
          ++result.diagnostics.bypassed_frames;
          break;
        case ErrorKind::kNumerical:
        case ErrorKind::kValidation:
          ++result.diagnostics.numerical_failures;
          break;
        case ErrorKind::kStability:
          ++result.diagnostics.unstable_frames;
          break;
        default:
          throw;
      }
    }
  }
  result.output = OverlapAdd(frames);
  return result;
}

WaveformResult AnonymizeMcAdams(const AudioBuffer& buffer,
                                const AnonymizerConfig& cfg,
                                const UtteranceKey& key) {
  cfg.Validate();
  const uint64_t seed = DerivedSeedFor(cfg, key);
  Rng rng(seed);
  const auto [lo, hi] = cfg.mcadams_alpha_range;
  const double alpha = lo == hi ? lo : rng.Uniform(lo, hi);
  WaveformResult result = ApplyMcAdams(buffer, alpha);
  result.drawn.derived_seed = seed;
  return result;
}

std::vector<size_t> RankFarthest(const SpeakerEmbedding& source,
                                 const EmbeddingPool& pool, size_t k) {
  Require(k <= pool.size(), "RankFarthest: k exceeds pool size");
  std::vector<double> distance(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    distance[i] = 1.0 - CosineSimilarity(source, pool.entries()[i].embedding);
  }
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](size_t a, size_t b) {
                      if (distance[a] != distance[b]) {
                        return distance[a] > distance[b];
                      }
                      return a < b;
                    });
  order.resize(k);
  return order;
}

SpeakerEmbedding AveragePoolEntries(const EmbeddingPool& pool,
                                    std::span<const std::string> ids) {
  Require(!ids.empty(), "AveragePoolEntries: no ids");
  std::vector<double> mean(pool.dimension(), 0.0);
  for (const auto& id : ids) {
    const auto it = std::find_if(pool.entries().begin(), pool.entries().end(),
                                 [&](const PoolEntry& e) { return e.id == id; });
    if (it == pool.entries().end()) {
      Fail(ErrorKind::kValidation, fmt::format("unknown pool id '{}'", id));
    }
    const auto& v = it->embedding.values();
    for (size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
  }
  double norm = 0.0;
  for (double& x : mean) {
    x /= static_cast<double>(ids.size());
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) {
    Fail(ErrorKind::kValidation, "pool average is the zero vector");
  }
  for (double& x : mean) x /= norm;
  return SpeakerEmbedding::FromDoubles(mean);
}

EmbeddingResult AnonymizeEmbeddingPool(const SpeakerEmbedding& source,
                                       const EmbeddingPool& pool,
                                       const AnonymizerConfig& cfg,
                                       const UtteranceKey& key) {
  cfg.Validate();
  const size_t k = static_cast<size_t>(cfg.pool_farthest_k);
  const size_t m = static_cast<size_t>(cfg.pool_average_m);
  if (pool.size() < k) {
    Fail(ErrorKind::kValidation,
         fmt::format("pool has {} entries, need at least k = {}", pool.size(),
                     k));
  }
  if (pool.dimension() != source.dimension()) {
    Fail(ErrorKind::kValidation,
         fmt::format("pool dimension {} differs from source dimension {}",
                     pool.dimension(), source.dimension()));
  }
  const auto farthest = RankFarthest(source, pool, k);

  const uint64_t seed = DerivedSeedFor(cfg, key);
  Rng rng(seed);
  std::vector<size_t> slots(k);
  std::iota(slots.begin(), slots.end(), 0);
  for (size_t i = 0; i < m; ++i) {
    const size_t j = i + static_cast<size_t>(rng.UniformInt(k - i));
    std::swap(slots[i], slots[j]);
  }

  EmbeddingResult result;
  result.drawn.method = AnonymizationMethod::kPoolAverage;
  result.drawn.derived_seed = seed;
  for (size_t i = 0; i < m; ++i) {
    result.drawn.chosen_ids.push_back(pool.entries()[farthest[slots[i]]].id);
  }
  result.output = AveragePoolEntries(pool, result.drawn.chosen_ids);
  return result;
}

DiagonalGaussianSampler::DiagonalGaussianSampler(std::vector<double> mean,
                                                 std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  Require(!mean_.empty() && mean_.size() == stddev_.size(),
          "DiagonalGaussianSampler: mean/stddev size mismatch");
}

DiagonalGaussianSampler DiagonalGaussianSampler::FitToPool(
    const EmbeddingPool& pool) {
  if (pool.size() < 2) {
    Fail(ErrorKind::kValidation,
         "sampler needs a pool of at least two embeddings");
  }
  const size_t dim = pool.dimension();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& e : pool.entries()) {
    for (size_t d = 0; d < dim; ++d) mean[d] += e.embedding.values()[d];
  }
  for (double& x : mean) x /= static_cast<double>(pool.size());
  for (const auto& e : pool.entries()) {
    for (size_t d = 0; d < dim; ++d) {
      const double diff = e.embedding.values()[d] - mean[d];
      var[d] += diff * diff;
    }
  }
  for (double& x : var) x = std::sqrt(x / static_cast<double>(pool.size()));
  return DiagonalGaussianSampler(std::move(mean), std::move(var));
}

std::vector<double> DiagonalGaussianSampler::Draw(Rng& rng) const {
  std::vector<double> v(mean_.size());
  for (size_t d = 0; d < v.size(); ++d) {
    v[d] = mean_[d] + stddev_[d] * rng.Gaussian();
  }
  return v;
}

EmbeddingResult AnonymizeEmbeddingSampled(const SpeakerEmbedding& source,
                                          const EmbeddingSampler& sampler,
                                          const AnonymizerConfig& cfg,
                                          const UtteranceKey& key) {
  cfg.Validate();
  if (sampler.dimension() != source.dimension()) {
    Fail(ErrorKind::kValidation,
         fmt::format("sampler dimension {} differs from source dimension {}",
                     sampler.dimension(), source.dimension()));
  }
  const uint64_t seed = DerivedSeedFor(cfg, key);
  Rng rng(seed);
  for (int attempt = 1; attempt <= kMaxSamplingAttempts; ++attempt) {
    const auto draw = sampler.Draw(rng);
    std::vector<float> values(draw.begin(), draw.end());
    if (std::all_of(values.begin(), values.end(),
                    [](float v) { return v == 0.0f; })) {
      continue;
    }
    SpeakerEmbedding candidate(std::move(values));
    // The test runs on the float vector that is actually emitted.
    if (CosineSimilarity(candidate, source) < cfg.cosine_threshold) {
      EmbeddingResult result;
      result.output = std::move(candidate);
      result.drawn.method = AnonymizationMethod::kConstrainedSample;
      result.drawn.derived_seed = seed;
      result.drawn.attempts = attempt;
      return result;
    }
  }
  Fail(ErrorKind::kSamplingExhausted,
       fmt::format("no candidate with cosine < {} after {} attempts",
                   cfg.cosine_threshold, kMaxSamplingAttempts));
}

}  // namespace sanon
