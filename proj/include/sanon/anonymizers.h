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

#ifndef SANON_ANONYMIZERS_H_
#define SANON_ANONYMIZERS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sanon/audio_io.h"
#include "sanon/dsp_core.h"
#include "sanon/embeddings.h"
#include "sanon/random.h"

namespace sanon {

enum class AnonymizationMethod {
  kPitchShift,
  kMcAdams,
  kPoolAverage,
  kConstrainedSample,
};

std::string_view MethodName(AnonymizationMethod method);
// Throws kValidation for an unknown name.
AnonymizationMethod ParseMethod(std::string_view name);
bool IsWaveformMethod(AnonymizationMethod method);

enum class RandomizationScope { kPerSpeaker, kPerUtterance };

std::string_view ScopeName(RandomizationScope scope);
RandomizationScope ParseScope(std::string_view name);

struct AnonymizerConfig {
  AnonymizationMethod method = AnonymizationMethod::kMcAdams;
  std::pair<double, double> semitone_range{3.0, 5.0};
  std::pair<double, double> mcadams_alpha_range{0.5, 0.9};
  int pool_farthest_k = 200;
  int pool_average_m = 100;
  double cosine_threshold = 0.7;
  // Unset means the method default: per utterance for McAdams, per speaker
  // for everything else.
  std::optional<RandomizationScope> randomization_scope;
  uint64_t seed = 0;

  RandomizationScope EffectiveScope() const;
  // Throws kValidation when a field is out of range.
  void Validate() const;
};

struct UtteranceKey {
  std::string speaker_id;
  std::string utt_id;
};

uint64_t DerivedSeedFor(const AnonymizerConfig& cfg, const UtteranceKey& key);

// Everything sampled for one utterance. Together with the input it fully
// determines the output.
struct DrawnParams {
  AnonymizationMethod method = AnonymizationMethod::kMcAdams;
  uint64_t derived_seed = 0;
  std::optional<double> semitones;
  std::optional<uint64_t> noise_seed;
  std::optional<double> alpha;
  std::vector<std::string> chosen_ids;
  std::optional<int> attempts;
};

struct Diagnostics {
  size_t bypassed_frames = 0;     // silent frames passed through
  size_t numerical_failures = 0;  // root finder / Levinson failures
  size_t unstable_frames = 0;
  size_t clamp_count = 0;         // f0 values clamped into range
  size_t clipped_samples = 0;     // filled in when the output is written

  Diagnostics& operator+=(const Diagnostics& other);
};

template <typename Output>
struct AnonymizationResult {
  Output output;
  DrawnParams drawn;
  Diagnostics diagnostics;
};

using WaveformResult = AnonymizationResult<AudioBuffer>;
using EmbeddingResult = AnonymizationResult<SpeakerEmbedding>;

// Pitch shift: s = sign * u with sign = +-1 equiprobable and
// u ~ U[lo, hi] semitones, then vocoder resynthesis with the shifted f0.
WaveformResult AnonymizePitchShift(const AudioBuffer& buffer,
                                   const AnonymizerConfig& cfg,
                                   const UtteranceKey& key);
WaveformResult ApplyPitchShift(const AudioBuffer& buffer, double semitones,
                               uint64_t noise_seed);

// Keeps every pole magnitude; a pole with |Im| > 1e-8 gets phase
// sign(phi) |phi|^alpha. Real poles are returned untouched.
PoleSet McAdamsTransform(const PoleSet& poles, double alpha);

// McAdams envelope warping on 20 ms Hann frames with a 10 ms hop, order-20
// LPC. alpha ~ U[alpha_lo, alpha_hi].
WaveformResult AnonymizeMcAdams(const AudioBuffer& buffer,
                                const AnonymizerConfig& cfg,
                                const UtteranceKey& key);
WaveformResult ApplyMcAdams(const AudioBuffer& buffer, double alpha);

inline constexpr int kMcAdamsLpcOrder = 20;
inline constexpr double kMcAdamsFrameMs = 20.0;
inline constexpr double kMcAdamsHopMs = 10.0;

// Pool indices of the k entries farthest from `source` in cosine distance,
// farthest first; ties go to the lower index.
std::vector<size_t> RankFarthest(const SpeakerEmbedding& source,
                                 const EmbeddingPool& pool, size_t k);

// Picks m of the k farthest pool entries uniformly without replacement and
// returns their mean scaled to unit length.
EmbeddingResult AnonymizeEmbeddingPool(const SpeakerEmbedding& source,
                                       const EmbeddingPool& pool,
                                       const AnonymizerConfig& cfg,
                                       const UtteranceKey& key);
SpeakerEmbedding AveragePoolEntries(const EmbeddingPool& pool,
                                    std::span<const std::string> ids);

class EmbeddingSampler {
 public:
  virtual ~EmbeddingSampler() = default;
  virtual size_t dimension() const = 0;
  virtual std::vector<double> Draw(Rng& rng) const = 0;
};

// Independent Gaussian per dimension, fitted to a pool.
class DiagonalGaussianSampler : public EmbeddingSampler {
 public:
  DiagonalGaussianSampler(std::vector<double> mean, std::vector<double> stddev);
  static DiagonalGaussianSampler FitToPool(const EmbeddingPool& pool);

  size_t dimension() const override { return mean_.size(); }
  std::vector<double> Draw(Rng& rng) const override;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

inline constexpr int kMaxSamplingAttempts = 1000;

// Rejection sampling until cos(candidate, source) < cosine_threshold; throws
// kSamplingExhausted after 1000 attempts.
EmbeddingResult AnonymizeEmbeddingSampled(const SpeakerEmbedding& source,
                                          const EmbeddingSampler& sampler,
                                          const AnonymizerConfig& cfg,
                                          const UtteranceKey& key);

}  // namespace sanon

#endif  // SANON_ANONYMIZERS_H_
