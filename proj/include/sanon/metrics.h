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

#ifndef SANON_METRICS_H_
#define SANON_METRICS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sanon/embeddings.h"

namespace sanon {

struct Trial {
  std::string enroll_utt;
  std::string test_utt;
  bool is_mated = false;

  bool operator==(const Trial&) const = default;
};

struct TrialList {
  std::vector<Trial> trials;
};

// CSV with header `enroll_utt,test_utt,label`, label in {mated, nonmated}.
TrialList LoadTrials(const std::filesystem::path& path);
void WriteTrials(const TrialList& trials, const std::filesystem::path& path);

struct ScoreSet {
  std::vector<double> mated;
  std::vector<double> nonmated;
};

// Cosine score per trial. Enrollment utterances are looked up in `enroll`,
// test utterances in `test`. Throws kValidation naming any missing utterance.
ScoreSet ScoreTrials(const TrialList& trials,
                     const UtteranceEmbeddingSet& enroll,
                     const UtteranceEmbeddingSet& test);
ScoreSet ScoreTrials(const TrialList& trials,
                     const UtteranceEmbeddingSet& embeddings);

// FRR(t) = share of mated scores below t, FAR(t) = share of non-mated scores
// at or above t, swept over every distinct score plus +inf. Returns the
// crossing point as a fraction, interpolated linearly between the two
// bracketing operating points.
double ComputeEer(const ScoreSet& scores);

struct SimilarityMatrix {
  std::vector<std::string> speaker_ids;
  std::vector<double> values;  // row-major n x n

  size_t size() const { return speaker_ids.size(); }
  double at(size_t i, size_t j) const { return values[i * size() + j]; }
};

// Entry (i, j) is the mean cosine similarity over utterance pairs of
// speakers i and j; pairs of an utterance with itself are skipped on the
// diagonal. Speakers are ordered by id.
SimilarityMatrix BuildSimilarityMatrix(const UtteranceEmbeddingSet& embeddings);

// |mean(diagonal) - mean(off-diagonal)|
double DiagonalDominance(const SimilarityMatrix& matrix);

// Gain of voice distinctiveness in dB. Anonymized dominance of exactly zero
// yields a typed negative-infinity value rather than a floating -inf.
class Gvd {
 public:
  static Gvd Decibels(double db) { return Gvd(db, false); }
  static Gvd NegativeInfinity() { return Gvd(0.0, true); }

  bool is_negative_infinity() const { return negative_infinity_; }
  // Only meaningful when finite.
  double db() const { return db_; }
  // -inf as a double, for arithmetic that wants it.
  double AsDouble() const;
  std::string ToString() const;

 private:
  Gvd(double db, bool negative_infinity)
      : db_(db), negative_infinity_(negative_infinity) {}

  double db_;
  bool negative_infinity_;
};

// 10 log10(D(anonymized) / D(original)). Throws kUndefinedBaseline when the
// original dominance is zero and kValidation when the speaker lists differ.
Gvd ComputeGvd(const SimilarityMatrix& original,
               const SimilarityMatrix& anonymized);

// Sample Pearson correlation. Throws kUndefinedCorrelation for a constant
// input and kPrecondition for mismatched or too-short inputs.
double Pearson(std::span<const double> x, std::span<const double> y);

struct SystemMetricsTable {
  struct Row {
    std::string system;
    std::vector<std::optional<double>> cells;  // aligned with columns
  };
  std::vector<std::string> columns;
  std::vector<Row> rows;

  // -1 when absent.
  int ColumnIndex(const std::string& name) const;
};

// Header `system,<metric>,...`; an empty cell is missing, `-inf` is accepted.
SystemMetricsTable LoadSystemMetrics(const std::filesystem::path& path);

struct UtteranceScore {
  std::string system;
  std::string utt_id;
  std::string metric;
  double value = 0.0;
};

// Header `system,utt_id,metric,value`. When `known_utts` is given, every
// utt_id must be in it.
std::vector<UtteranceScore> LoadUtteranceScores(
    const std::filesystem::path& path,
    const std::unordered_set<std::string>* known_utts = nullptr);

// Per-system mean of each metric; systems and metrics in first-seen order.
SystemMetricsTable AggregateUtteranceScores(
    const std::vector<UtteranceScore>& scores);

enum class ScoreSchema { kPerUtterance, kPerSystem };

// Loads either schema into a per-system table.
SystemMetricsTable IngestExternalScores(
    const std::filesystem::path& path, ScoreSchema schema,
    const std::unordered_set<std::string>* known_utts = nullptr);
// Picks the schema from the header.
ScoreSchema DetectScoreSchema(const std::filesystem::path& path);

struct ScatterPoint {
  std::string system;
  double x = 0.0;
  double y = 0.0;
};

struct CorrelationResult {
  std::string x_column;
  std::string y_column;
  double r = 0.0;
  size_t n = 0;  // rows with both cells present
  std::vector<ScatterPoint> scatter;
  std::vector<std::string> warnings;
};

using ColumnPair = std::pair<std::string, std::string>;

// The six SA-side metrics against the two TTS-side metrics.
std::vector<ColumnPair> DefaultCorrelationPairs();

// Pearson per pair over rows with both cells present; missing cells and
// -inf values are skipped pairwise (the latter with a warning). Throws
// kValidation for an unknown column or fewer than two usable rows.
std::vector<CorrelationResult> CorrelateTable(
    const SystemMetricsTable& table, const std::vector<ColumnPair>& pairs);

}  // namespace sanon

#endif  // SANON_METRICS_H_
