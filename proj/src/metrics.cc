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

#include "sanon/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "sanon/csv.h"
#include "sanon/error.h"

namespace sanon {

TrialList LoadTrials(const std::filesystem::path& path) {
  const CsvDocument doc = ReadCsv(path);
  if (JoinCsv(doc.header) != "enroll_utt,test_utt,label") {
    Fail(ErrorKind::kSchema,
         fmt::format("{}: header must be 'enroll_utt,test_utt,label'",
                     path.string()));
  }
  TrialList list;
  for (const auto& row : doc.rows) {
    if (row.fields.size() != 3) {
      Fail(ErrorKind::kSchema, fmt::format("{}:{}: expected 3 columns",
                                           path.string(), row.line));
    }
    const auto& label = row.fields[2];
    if (label != "mated" && label != "nonmated") {
      Fail(ErrorKind::kValidation,
           fmt::format("{}:{}: label must be mated or nonmated, got '{}'",
                       path.string(), row.line, label));
    }
    list.trials.push_back({row.fields[0], row.fields[1], label == "mated"});
  }
  return list;
}

void WriteTrials(const TrialList& trials, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  out << "enroll_utt,test_utt,label\n";
  for (const auto& t : trials.trials) {
    out << t.enroll_utt << ',' << t.test_utt << ','
        << (t.is_mated ? "mated" : "nonmated") << '\n';
  }
}

ScoreSet ScoreTrials(const TrialList& trials,
                     const UtteranceEmbeddingSet& enroll,
                     const UtteranceEmbeddingSet& test) {
  ScoreSet scores;
  for (const auto& t : trials.trials) {
    const auto* a = enroll.Find(t.enroll_utt);
    if (a == nullptr) {
      Fail(ErrorKind::kValidation,
           fmt::format("trial references unknown utterance '{}'", t.enroll_utt));
    }
    const auto* b = test.Find(t.test_utt);
    if (b == nullptr) {
      Fail(ErrorKind::kValidation,
           fmt::format("trial references unknown utterance '{}'", t.test_utt));
    }
    const double s = CosineSimilarity(a->embedding, b->embedding);
    (t.is_mated ? scores.mated : scores.nonmated).push_back(s);
  }
  return scores;
}

ScoreSet ScoreTrials(const TrialList& trials,
                     const UtteranceEmbeddingSet& embeddings) {
  return ScoreTrials(trials, embeddings, embeddings);
}

double ComputeEer(const ScoreSet& scores) {
  Require(!scores.mated.empty() && !scores.nonmated.empty(),
          "ComputeEer: both score sets must be non-empty");
  std::vector<std::pair<double, bool>> all;  // (score, is_mated)
  all.reserve(scores.mated.size() + scores.nonmated.size());
  for (double s : scores.mated) all.emplace_back(s, true);
  for (double s : scores.nonmated) all.emplace_back(s, false);
  std::sort(all.begin(), all.end());

  const double n_mated = static_cast<double>(scores.mated.size());
  const double n_non = static_cast<double>(scores.nonmated.size());
  size_t mated_below = 0, non_below = 0;
  double prev_frr = 0.0, prev_far = 1.0;
  bool have_prev = false;
  size_t i = 0;
  while (true) {
    // Operating point at the next distinct score, or +inf past the end.
    const double frr = mated_below / n_mated;
    const double far = (n_non - non_below) / n_non;
    if (frr >= far) {
      if (!have_prev || frr == far) return frr;
      const double gap_prev = prev_far - prev_frr;
      const double gap_here = far - frr;
      const double t = gap_prev / (gap_prev - gap_here);
      return prev_frr + t * (frr - prev_frr);
    }
    prev_frr = frr;
    prev_far = far;
    have_prev = true;
    if (i == all.size()) break;
    const double value = all[i].first;
    while (i < all.size() && all[i].first == value) {
      (all[i].second ? mated_below : non_below)++;
      ++i;
    }
  }
  return prev_frr;  // not reached: FRR = 1 >= FAR = 0 at +inf
}

SimilarityMatrix BuildSimilarityMatrix(const UtteranceEmbeddingSet& embeddings) {
  std::map<std::string, std::vector<const SpeakerEmbedding*>> by_speaker;
  for (const auto& item : embeddings.items()) {
    by_speaker[item.speaker_id].push_back(&item.embedding);
  }
  if (by_speaker.size() < 2) {
    Fail(ErrorKind::kValidation,
         "similarity matrix needs at least two speakers");
  }
  SimilarityMatrix m;
  std::vector<const std::vector<const SpeakerEmbedding*>*> groups;
  for (const auto& [speaker, list] : by_speaker) {
    if (list.size() < 2) {
      Fail(ErrorKind::kValidation,
           fmt::format("speaker '{}' has a single utterance; need >= 2",
                       speaker));
    }
    m.speaker_ids.push_back(speaker);
    groups.push_back(&list);
  }
  const size_t n = groups.size();
  m.values.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i; j < n; ++j) {
      double sum = 0.0;
      size_t count = 0;
      for (size_t a = 0; a < groups[i]->size(); ++a) {
        for (size_t b = 0; b < groups[j]->size(); ++b) {
          if (i == j && a == b) continue;
          sum += CosineSimilarity(*(*groups[i])[a], *(*groups[j])[b]);
          ++count;
        }
      }
      m.values[i * n + j] = m.values[j * n + i] = sum / count;
    }
  }
  return m;
}

double DiagonalDominance(const SimilarityMatrix& m) {
  const size_t n = m.size();
  Require(n >= 2 && m.values.size() == n * n,
          "DiagonalDominance: need an n x n matrix with n >= 2");
  double diag = 0.0, off = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      (i == j ? diag : off) += m.at(i, j);
    }
  }
  diag /= static_cast<double>(n);
  off /= static_cast<double>(n * (n - 1));
  return std::abs(diag - off);
}

double Gvd::AsDouble() const {
  return negative_infinity_ ? -std::numeric_limits<double>::infinity() : db_;
}

std::string Gvd::ToString() const {
  return negative_infinity_ ? "-inf" : fmt::format("{:.6f}", db_);
}

Gvd ComputeGvd(const SimilarityMatrix& original,
               const SimilarityMatrix& anonymized) {
  if (original.speaker_ids != anonymized.speaker_ids) {
    Fail(ErrorKind::kValidation,
         "GVD: original and anonymized speaker lists differ");
  }
  const double base = DiagonalDominance(original);
  if (!(base > 0.0)) {
    Fail(ErrorKind::kUndefinedBaseline,
         "GVD: original diagonal dominance is zero");
  }
  const double anon = DiagonalDominance(anonymized);
  if (anon == 0.0) return Gvd::NegativeInfinity();
  return Gvd::Decibels(10.0 * std::log10(anon / base));
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  Require(x.size() == y.size() && x.size() >= 2,
          "Pearson: need equal-length inputs with at least two values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    Fail(ErrorKind::kUndefinedCorrelation,
         "Pearson: correlation undefined for a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

int SystemMetricsTable::ColumnIndex(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

SystemMetricsTable LoadSystemMetrics(const std::filesystem::path& path) {
  const CsvDocument doc = ReadCsv(path);
  if (doc.header.size() < 2 || doc.header[0] != "system") {
    Fail(ErrorKind::kSchema,
         fmt::format("{}: header must be 'system,<metric>,...'", path.string()));
  }
  SystemMetricsTable table;
  table.columns.assign(doc.header.begin() + 1, doc.header.end());
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (table.columns[c].empty() ||
        std::count(table.columns.begin(), table.columns.end(),
                   table.columns[c]) > 1) {
      Fail(ErrorKind::kSchema,
           fmt::format("{}: empty or duplicate column name '{}'",
                       path.string(), table.columns[c]));
    }
  }
  for (const auto& row : doc.rows) {
    if (row.fields.size() != doc.header.size()) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}: row {} has {} cells, expected {}", path.string(),
                       row.line, row.fields.size(), doc.header.size()));
    }
    SystemMetricsTable::Row out{row.fields[0], {}};
    for (size_t c = 1; c < row.fields.size(); ++c) {
      if (row.fields[c].empty()) {
        out.cells.emplace_back();
        continue;
      }
      double v;
      if (!ParseDouble(row.fields[c], &v)) {
        Fail(ErrorKind::kValidation,
             fmt::format("{}: row {}: non-numeric value '{}' in column '{}'",
                         path.string(), row.line, row.fields[c],
                         doc.header[c]));
      }
      out.cells.emplace_back(v);
    }
    table.rows.push_back(std::move(out));
  }
  return table;
}

std::vector<UtteranceScore> LoadUtteranceScores(
    const std::filesystem::path& path,
    const std::unordered_set<std::string>* known_utts) {
  const CsvDocument doc = ReadCsv(path);
  if (JoinCsv(doc.header) != "system,utt_id,metric,value") {
    Fail(ErrorKind::kSchema,
         fmt::format("{}: header must be 'system,utt_id,metric,value'",
                     path.string()));
  }
  std::vector<UtteranceScore> scores;
  for (const auto& row : doc.rows) {
    if (row.fields.size() != 4) {
      Fail(ErrorKind::kValidation, fmt::format("{}: row {}: expected 4 cells",
                                               path.string(), row.line));
    }
    UtteranceScore s{row.fields[0], row.fields[1], row.fields[2], 0.0};
    if (!ParseDouble(row.fields[3], &s.value) || !std::isfinite(s.value)) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}: row {}: non-numeric value '{}'", path.string(),
                       row.line, row.fields[3]));
    }
    if (known_utts != nullptr && !known_utts->contains(s.utt_id)) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}: row {}: unknown utt_id '{}'", path.string(),
                       row.line, s.utt_id));
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

SystemMetricsTable AggregateUtteranceScores(
    const std::vector<UtteranceScore>& scores) {
  SystemMetricsTable table;
  std::vector<std::vector<std::pair<double, size_t>>> sums;  // [row][col]
  for (const auto& s : scores) {
    int col = table.ColumnIndex(s.metric);
    if (col < 0) {
      table.columns.push_back(s.metric);
      col = static_cast<int>(table.columns.size()) - 1;
      for (auto& r : sums) r.emplace_back(0.0, 0);
    }
    auto it = std::find_if(table.rows.begin(), table.rows.end(),
                           [&](const auto& r) { return r.system == s.system; });
    size_t row;
    if (it == table.rows.end()) {
      table.rows.push_back({s.system, {}});
      sums.emplace_back(table.columns.size(), std::make_pair(0.0, size_t{0}));
      row = table.rows.size() - 1;
    } else {
      row = static_cast<size_t>(it - table.rows.begin());
    }
    sums[row][col].first += s.value;
    sums[row][col].second += 1;
  }
  for (size_t r = 0; r < table.rows.size(); ++r) {
    for (size_t c = 0; c < table.columns.size(); ++c) {
      const auto [sum, count] = sums[r][c];
      if (count > 0) {
        table.rows[r].cells.emplace_back(sum / static_cast<double>(count));
      } else {
        table.rows[r].cells.emplace_back();
      }
    }
  }
  return table;
}

ScoreSchema DetectScoreSchema(const std::filesystem::path& path) {
  const CsvDocument doc = ReadCsv(path);
  return JoinCsv(doc.header) == "system,utt_id,metric,value"
             ? ScoreSchema::kPerUtterance
             : ScoreSchema::kPerSystem;
}

SystemMetricsTable IngestExternalScores(
    const std::filesystem::path& path, ScoreSchema schema,
    const std::unordered_set<std::string>* known_utts) {
  if (schema == ScoreSchema::kPerSystem) return LoadSystemMetrics(path);
  return AggregateUtteranceScores(LoadUtteranceScores(path, known_utts));
}

std::vector<ColumnPair> DefaultCorrelationPairs() {
  std::vector<ColumnPair> pairs;
  for (const char* sa : {"WER", "EER", "GVD", "UTMOS", "SA-NAT", "SA-SIM"}) {
    for (const char* tts : {"TTS-NAT", "TTS-SIM"}) pairs.emplace_back(sa, tts);
  }
  return pairs;
}

std::vector<CorrelationResult> CorrelateTable(
    const SystemMetricsTable& table, const std::vector<ColumnPair>& pairs) {
  std::vector<CorrelationResult> results;
  for (const auto& [xname, yname] : pairs) {
    const int xc = table.ColumnIndex(xname);
    const int yc = table.ColumnIndex(yname);
    if (xc < 0 || yc < 0) {
      Fail(ErrorKind::kValidation,
           fmt::format("unknown column '{}'", xc < 0 ? xname : yname));
    }
    CorrelationResult res;
    res.x_column = xname;
    res.y_column = yname;
    std::vector<double> xs, ys;
    for (const auto& row : table.rows) {
      const auto& x = row.cells[xc];
      const auto& y = row.cells[yc];
      if (!x || !y) continue;
      if (!std::isfinite(*x) || !std::isfinite(*y)) {
        res.warnings.push_back(fmt::format(
            "system '{}' excluded from {} vs {}: non-finite value", row.system,
            xname, yname));
        continue;
      }
      xs.push_back(*x);
      ys.push_back(*y);
      res.scatter.push_back({row.system, *x, *y});
    }
    if (xs.size() < 2) {
      Fail(ErrorKind::kValidation,
           fmt::format("{} vs {}: need at least two systems with both values, "
                       "have {}",
                       xname, yname, xs.size()));
    }
    res.n = xs.size();
    res.r = Pearson(xs, ys);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace sanon
