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

#ifndef SANON_EMBEDDINGS_H_
#define SANON_EMBEDDINGS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sanon/audio_io.h"

namespace sanon {

// Fixed-dimension speaker vector with a cached Euclidean norm. Values are
// stored as float32 so that the on-disk format round-trips bit-exactly.
class SpeakerEmbedding {
 public:
  SpeakerEmbedding() = default;
  // Throws kValidation for an empty, zero or non-finite vector.
  explicit SpeakerEmbedding(std::vector<float> values);
  static SpeakerEmbedding FromDoubles(std::span<const double> values);

  const std::vector<float>& values() const { return values_; }
  size_t dimension() const { return values_.size(); }
  double norm() const { return norm_; }

  bool operator==(const SpeakerEmbedding& other) const {
    return values_ == other.values_;
  }

 private:
  std::vector<float> values_;
  double norm_ = 0.0;
};

// a.b / (|a| |b|), clamped to [-1, 1]. Throws kValidation on dimension
// mismatch.
double CosineSimilarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

struct PoolEntry {
  std::string id;
  SpeakerEmbedding embedding;

  bool operator==(const PoolEntry&) const = default;
};

class EmbeddingPool {
 public:
  EmbeddingPool() = default;

  // Throws kValidation on a dimension clash or a duplicate id.
  void Add(std::string id, SpeakerEmbedding embedding);

  const std::vector<PoolEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  size_t dimension() const { return dimension_; }
  std::vector<std::string>& warnings() { return warnings_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool operator==(const EmbeddingPool& other) const {
    return dimension_ == other.dimension_ && entries_ == other.entries_;
  }

 private:
  size_t dimension_ = 0;
  std::vector<PoolEntry> entries_;
  std::vector<std::string> warnings_;
};

struct UtteranceEmbedding {
  std::string utt_id;
  std::string speaker_id;
  SpeakerEmbedding embedding;
};

class UtteranceEmbeddingSet {
 public:
  // Throws kValidation on a duplicate utt_id or a dimension clash.
  void Add(std::string utt_id, std::string speaker_id,
           SpeakerEmbedding embedding);

  const std::vector<UtteranceEmbedding>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  // nullptr when absent.
  const UtteranceEmbedding* Find(const std::string& utt_id) const;

 private:
  std::vector<UtteranceEmbedding> items_;
  std::vector<std::pair<std::string, size_t>> index_;  // sorted by utt_id
};

// Binary pool format, little-endian:
//   "SAEB" | version u16 | dimension u32 | count u32 |
//   count x (id length u16 | id UTF-8 | dimension x float32)
inline constexpr uint16_t kSaebVersion = 1;

void SavePool(const EmbeddingPool& pool, const std::filesystem::path& path);
// Accepts the SAEB format, or CSV rows `id,v0,v1,...` (optional header whose
// first cell is `id`) when the file does not start with the SAEB magic.
EmbeddingPool LoadPool(const std::filesystem::path& path);

inline constexpr int kBaselineCepstra = 20;
inline constexpr int kBaselineDimension = 2 * kBaselineCepstra + 2;

// Means and standard deviations of 20 mel-cepstral coefficients (25 ms / 10
// ms frames) followed by mean and standard deviation of log f0 over voiced
// frames. Deterministic. Needs at least 0.5 s of 16 kHz audio.
SpeakerEmbedding ExtractBaselineEmbedding(const AudioBuffer& buffer);

}  // namespace sanon

#endif  // SANON_EMBEDDINGS_H_
