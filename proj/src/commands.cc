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

#include "sanon/commands.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "sanon/anonymizers.h"
#include "sanon/audio_io.h"
#include "sanon/csv.h"
#include "sanon/embeddings.h"
#include "sanon/random.h"

namespace sanon {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kIo ? kExitIo : kExitValidation;
}

namespace {

// Runs fn(i) for i in [0, count) on up to `workers` threads. fn must not
// throw; results land in caller-owned slots indexed by i, so the outcome
// never depends on scheduling.
template <typename Fn>
void ParallelFor(size_t count, int workers, Fn&& fn) {
  const size_t threads =
      std::min<size_t>(count, static_cast<size_t>(std::max(workers, 1)));
  std::atomic<size_t> next{0};
  auto drain = [&] {
    for (size_t i = next++; i < count; i = next++) fn(i);
  };
  if (threads <= 1) {
    drain();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
}

AudioBuffer LoadWorkingAudio(const fs::path& path) {
  AudioBuffer buffer = ReadWav(path);
  if (buffer.empty()) {
    Fail(ErrorKind::kValidation, fmt::format("{}: no samples", path.string()));
  }
  if (buffer.sample_rate_hz != kWorkingRateHz) {
    buffer = Resample(buffer, kWorkingRateHz);
  }
  return buffer;
}

fs::path DefaultRoot(const RunConfig& config, const fs::path& manifest,
                     const fs::path& explicit_root) {
  (void)config;
  if (!explicit_root.empty()) return explicit_root;
  return manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
}

void EnsureDirectory(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    Fail(ErrorKind::kIo,
         fmt::format("cannot create directory {}: {}", dir.string(),
                     ec.message()));
  }
}

void WriteReport(const Json& report, const fs::path& path) {
  EnsureDirectory(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  out << report.dump(2) << '\n';
  if (!out) Fail(ErrorKind::kIo, fmt::format("write failed: {}", path.string()));
}

Json ReportHeader(const RunConfig& config) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = CommandName(config.command);
  j["seed"] = config.seed();
  j["config_hash"] = ConfigHash(config);
  j["config"] = ConfigToJson(config);
  return j;
}

Json DrawnToJson(const DrawnParams& d) {
  Json j;
  j["method"] = MethodName(d.method);
  j["derived_seed"] = d.derived_seed;
  if (d.semitones) j["semitones"] = *d.semitones;
  if (d.noise_seed) j["noise_seed"] = *d.noise_seed;
  if (d.alpha) j["alpha"] = *d.alpha;
  if (!d.chosen_ids.empty()) j["chosen_ids"] = d.chosen_ids;
  if (d.attempts) j["attempts"] = *d.attempts;
  return j;
}

Json DiagnosticsToJson(const Diagnostics& d) {
  Json j;
  j["bypassed_frames"] = d.bypassed_frames;
  j["numerical_failures"] = d.numerical_failures;
  j["unstable_frames"] = d.unstable_frames;
  j["clamp_count"] = d.clamp_count;
  j["clipped_samples"] = d.clipped_samples;
  return j;
}

fs::path ReportPath(const RunConfig& config, const char* default_name) {
  if (!config.report.empty()) return config.report;
  return config.out / default_name;
}

void RequireDistinctOutput(const RunConfig& config, const fs::path& root) {
  Require(!config.out.empty(), "--out is required");
  if (fs::weakly_canonical(config.out) == fs::weakly_canonical(root)) {
    Fail(ErrorKind::kValidation,
         "output directory must differ from the input root");
  }
}

struct UtteranceOutcome {
  bool ok = false;
  std::string error;
  DrawnParams drawn;
  Diagnostics diagnostics;
  std::optional<SpeakerEmbedding> embedding;
};

}  // namespace

CommandOutcome RunAnonymize(const RunConfig& config) {
  Require(!config.manifest.empty(), "--manifest is required");
  const fs::path root = DefaultRoot(config, config.manifest, config.root);
  RequireDistinctOutput(config, root);
  config.anonymizer.Validate();
  const DatasetManifest manifest = LoadManifest(config.manifest, root);
  const AnonymizationMethod method = config.anonymizer.method;

  std::optional<EmbeddingPool> pool;
  std::optional<DiagonalGaussianSampler> sampler;
  if (!IsWaveformMethod(method)) {
    if (config.pool.empty()) {
      Fail(ErrorKind::kValidation,
           fmt::format("method {} needs --pool", MethodName(method)));
    }
    pool = LoadPool(config.pool);
    if (method == AnonymizationMethod::kConstrainedSample) {
      sampler = DiagonalGaussianSampler::FitToPool(*pool);
    }
  }
  EnsureDirectory(config.out);

  const auto& records = manifest.records;
  std::vector<UtteranceOutcome> outcomes(records.size());
  ParallelFor(records.size(), config.workers, [&](size_t i) {
    const UtteranceRecord& rec = records[i];
    UtteranceOutcome& out = outcomes[i];
    try {
      const AudioBuffer audio = LoadWorkingAudio(manifest.ResolvePath(rec));
      const UtteranceKey key{rec.speaker_id, rec.utt_id};
      if (IsWaveformMethod(method)) {
        WaveformResult result =
            method == AnonymizationMethod::kPitchShift
                ? AnonymizePitchShift(audio, config.anonymizer, key)
                : AnonymizeMcAdams(audio, config.anonymizer, key);
        const fs::path target = config.out / rec.audio_path;
        EnsureDirectory(target.parent_path());
        result.diagnostics.clipped_samples =
            WriteWav(result.output, target).clipped_samples;
        out.drawn = std::move(result.drawn);
        out.diagnostics = result.diagnostics;
      } else {
        const SpeakerEmbedding source = ExtractBaselineEmbedding(audio);
        EmbeddingResult result =
            method == AnonymizationMethod::kPoolAverage
                ? AnonymizeEmbeddingPool(source, *pool, config.anonymizer, key)
                : AnonymizeEmbeddingSampled(source, *sampler,
                                            config.anonymizer, key);
        out.embedding = std::move(result.output);
        out.drawn = std::move(result.drawn);
        out.diagnostics = result.diagnostics;
      }
      out.ok = true;
    } catch (const Error& e) {
      out.error = fmt::format("{} error: {}", ErrorKindName(e.kind()), e.what());
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  Json report = ReportHeader(config);
  report["manifest"] = config.manifest.generic_string();
  Json warnings = Json::array();
  for (const auto& w : manifest.warnings) warnings.push_back(w);
  for (const auto& w : pool ? pool->warnings() : std::vector<std::string>{}) {
    warnings.push_back(w);
  }

  std::vector<size_t> order(records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return records[a].utt_id < records[b].utt_id;
  });

  Diagnostics totals;
  Json utterances = Json::array();
  Json failures = Json::array();
  std::vector<UtteranceRecord> anon_records;
  EmbeddingPool anon_pool;
  for (size_t i : order) {
    const auto& rec = records[i];
    const auto& o = outcomes[i];
    Json u;
    u["utt_id"] = rec.utt_id;
    u["speaker_id"] = rec.speaker_id;
    if (o.ok) {
      u["status"] = "ok";
      u["output"] = IsWaveformMethod(method) ? rec.audio_path
                                             : std::string("anonymized_embeddings.saeb");
      u["drawn_params"] = DrawnToJson(o.drawn);
      u["diagnostics"] = DiagnosticsToJson(o.diagnostics);
      totals += o.diagnostics;
      if (o.diagnostics.clipped_samples > 0) {
        warnings.push_back(fmt::format("{}: {} samples clipped", rec.utt_id,
                                       o.diagnostics.clipped_samples));
      }
      if (o.embedding) anon_pool.Add(rec.utt_id, *o.embedding);
    } else {
      u["status"] = "failed";
      u["error"] = o.error;
      failures.push_back({{"utt_id", rec.utt_id}, {"error", o.error}});
    }
    utterances.push_back(std::move(u));
  }
  // Anonymized manifest keeps the input order.
  for (size_t i = 0; i < records.size(); ++i) {
    if (outcomes[i].ok && IsWaveformMethod(method)) {
      anon_records.push_back(records[i]);
    }
  }
  if (IsWaveformMethod(method)) {
    WriteManifest(anon_records, config.out / "manifest.csv");
  } else {
    SavePool(anon_pool, config.out / "anonymized_embeddings.saeb");
  }

  report["warnings"] = std::move(warnings);
  report["diagnostics"] = DiagnosticsToJson(totals);
  report["utterance_count"] = records.size();
  report["failure_count"] = failures.size();
  report["failures"] = std::move(failures);
  report["utterances"] = std::move(utterances);

  CommandOutcome outcome;
  outcome.exit_code =
      report["failure_count"].get<size_t>() > 0
          ? kExitPartialFailure
          : kExitSuccess;
  outcome.report_path = ReportPath(config, "report.json");
  WriteReport(report, outcome.report_path);
  outcome.report = std::move(report);
  return outcome;
}

namespace {

UtteranceEmbeddingSet ExtractSet(const DatasetManifest& manifest, int workers) {
  const auto& records = manifest.records;
  std::vector<std::optional<SpeakerEmbedding>> embeddings(records.size());
  std::vector<std::string> errors(records.size());
  ParallelFor(records.size(), workers, [&](size_t i) {
    try {
      embeddings[i] = ExtractBaselineEmbedding(
          LoadWorkingAudio(manifest.ResolvePath(records[i])));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  UtteranceEmbeddingSet set;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!embeddings[i]) {
      Fail(ErrorKind::kValidation,
           fmt::format("embedding failed for '{}': {}", records[i].utt_id,
                       errors[i]));
    }
    set.Add(records[i].utt_id, records[i].speaker_id, *embeddings[i]);
  }
  return set;
}

UtteranceEmbeddingSet SetFromPool(const EmbeddingPool& pool,
                                  const DatasetManifest& manifest) {
  std::map<std::string, std::string> speakers;
  for (const auto& r : manifest.records) speakers[r.utt_id] = r.speaker_id;
  UtteranceEmbeddingSet set;
  for (const auto& r : manifest.records) {
    const auto it =
        std::find_if(pool.entries().begin(), pool.entries().end(),
                     [&](const PoolEntry& e) { return e.id == r.utt_id; });
    if (it == pool.entries().end()) {
      Fail(ErrorKind::kValidation,
           fmt::format("no embedding for utterance '{}'", r.utt_id));
    }
    set.Add(r.utt_id, r.speaker_id, it->embedding);
  }
  return set;
}

}  // namespace

CommandOutcome RunEmbed(const RunConfig& config) {
  Require(!config.manifest.empty(), "--manifest is required");
  const fs::path root = DefaultRoot(config, config.manifest, config.root);
  RequireDistinctOutput(config, root);
  const DatasetManifest manifest = LoadManifest(config.manifest, root);
  EnsureDirectory(config.out);
  const UtteranceEmbeddingSet set = ExtractSet(manifest, config.workers);
  EmbeddingPool pool;
  for (const auto& item : set.items()) pool.Add(item.utt_id, item.embedding);
  SavePool(pool, config.out / "embeddings.saeb");

  Json report = ReportHeader(config);
  report["manifest"] = config.manifest.generic_string();
  report["warnings"] = manifest.warnings;
  report["utterance_count"] = set.size();
  report["dimension"] = pool.dimension();
  report["output"] = "embeddings.saeb";
  CommandOutcome outcome;
  outcome.report_path = ReportPath(config, "report.json");
  WriteReport(report, outcome.report_path);
  outcome.report = std::move(report);
  return outcome;
}

TrialList GenerateTrials(const std::vector<UtteranceRecord>& records,
                         uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_speaker;
  for (const auto& r : records) by_speaker[r.speaker_id].push_back(r.utt_id);
  TrialList list;
  for (auto& [speaker, utts] : by_speaker) {
    std::sort(utts.begin(), utts.end());
    for (size_t a = 0; a < utts.size(); ++a) {
      for (size_t b = a + 1; b < utts.size(); ++b) {
        list.trials.push_back({utts[a], utts[b], true});
      }
    }
  }
  const size_t mated = list.trials.size();
  if (by_speaker.size() < 2) {
    Fail(ErrorKind::kValidation,
         "automatic trials need at least two speakers");
  }
  std::vector<const UtteranceRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->utt_id < b->utt_id; });
  Rng rng(DeriveSeed(seed, "", "", "trials"));
  while (list.trials.size() < 2 * mated) {
    const auto* a = sorted[rng.UniformInt(sorted.size())];
    const auto* b = sorted[rng.UniformInt(sorted.size())];
    if (a->speaker_id == b->speaker_id) continue;
    list.trials.push_back({a->utt_id, b->utt_id, false});
  }
  return list;
}

CommandOutcome RunEvaluate(const RunConfig& config,
                           EvaluationSummary* summary) {
  Require(!config.manifest.empty(), "--manifest is required");
  Require(!config.anon_manifest.empty() || !config.anon_embeddings.empty(),
          "--anon-manifest is required");
  const fs::path root = DefaultRoot(config, config.manifest, config.root);
  const DatasetManifest original = LoadManifest(config.manifest, root);

  DatasetManifest anonymized;
  if (!config.anon_manifest.empty()) {
    anonymized = LoadManifest(
        config.anon_manifest,
        DefaultRoot(config, config.anon_manifest, config.anon_root));
    std::unordered_set<std::string> anon_ids;
    for (const auto& r : anonymized.records) anon_ids.insert(r.utt_id);
    for (const auto& r : original.records) {
      if (!anon_ids.contains(r.utt_id)) {
        Fail(ErrorKind::kValidation,
             fmt::format("utterance '{}' has no anonymized counterpart",
                         r.utt_id));
      }
    }
    // Speaker labels always come from the original manifest.
    std::map<std::string, const UtteranceRecord*> by_id;
    for (const auto& r : anonymized.records) by_id[r.utt_id] = &r;
    std::vector<UtteranceRecord> aligned;
    for (const auto& r : original.records) {
      UtteranceRecord a = *by_id[r.utt_id];
      a.speaker_id = r.speaker_id;
      aligned.push_back(std::move(a));
    }
    anonymized.records = std::move(aligned);
  } else {
    anonymized = original;
  }

  const UtteranceEmbeddingSet orig_set =
      config.orig_embeddings.empty()
          ? ExtractSet(original, config.workers)
          : SetFromPool(LoadPool(config.orig_embeddings), original);
  const UtteranceEmbeddingSet anon_set =
      config.anon_embeddings.empty()
          ? ExtractSet(anonymized, config.workers)
          : SetFromPool(LoadPool(config.anon_embeddings), original);

  const TrialList trials = config.trials.empty()
                               ? GenerateTrials(original.records, config.seed())
                               : LoadTrials(config.trials);
  const ScoreSet orig_scores = ScoreTrials(trials, orig_set);
  const ScoreSet anon_scores =
      config.attack == AttackScenario::kIgnorant
          ? ScoreTrials(trials, orig_set, anon_set)
          : ScoreTrials(trials, anon_set, anon_set);
  if (orig_scores.mated.empty() || orig_scores.nonmated.empty()) {
    Fail(ErrorKind::kValidation,
         "trials need at least one mated and one non-mated pair");
  }

  EvaluationSummary result;
  result.eer_original = ComputeEer(orig_scores);
  result.eer_anonymized = ComputeEer(anon_scores);
  result.gvd = ComputeGvd(BuildSimilarityMatrix(orig_set),
                          BuildSimilarityMatrix(anon_set));
  result.mated_trials = orig_scores.mated.size();
  result.nonmated_trials = orig_scores.nonmated.size();

  Json report = ReportHeader(config);
  report["manifest"] = config.manifest.generic_string();
  report["anon_manifest"] = config.anon_manifest.generic_string();
  Json warnings = Json::array();
  for (const auto& w : original.warnings) warnings.push_back(w);
  Json metrics;
  metrics["eer_original"] = result.eer_original;
  metrics["eer_anonymized"] = result.eer_anonymized;
  metrics["eer_original_percent"] = 100.0 * result.eer_original;
  metrics["eer_anonymized_percent"] = 100.0 * result.eer_anonymized;
  metrics["gvd_db"] = result.gvd.is_negative_infinity()
                          ? Json("-inf")
                          : Json(result.gvd.db());
  metrics["attack_scenario"] = AttackScenarioName(config.attack);
  metrics["mated_trials"] = result.mated_trials;
  metrics["nonmated_trials"] = result.nonmated_trials;
  metrics["trials_source"] = config.trials.empty() ? "generated" : "file";
  report["metrics"] = std::move(metrics);

  if (!config.scores.empty()) {
    std::unordered_set<std::string> known;
    for (const auto& r : original.records) known.insert(r.utt_id);
    const SystemMetricsTable table = IngestExternalScores(
        config.scores, DetectScoreSchema(config.scores), &known);
    Json external;
    for (const auto& row : table.rows) {
      Json cells;
      for (size_t c = 0; c < table.columns.size(); ++c) {
        cells[table.columns[c]] =
            row.cells[c] ? Json(*row.cells[c]) : Json(nullptr);
      }
      external[row.system] = std::move(cells);
    }
    report["external_metrics"] = std::move(external);
  }
  report["warnings"] = std::move(warnings);

  if (!config.out.empty() && config.trials.empty()) {
    EnsureDirectory(config.out);
    WriteTrials(trials, config.out / "trials.csv");
  }
  CommandOutcome outcome;
  if (!config.out.empty() || !config.report.empty()) {
    outcome.report_path = ReportPath(config, "evaluation.json");
    WriteReport(report, outcome.report_path);
  }
  outcome.report = std::move(report);
  if (summary != nullptr) *summary = result;
  return outcome;
}

std::vector<ColumnPair> ParsePairs(const std::string& text) {
  std::vector<ColumnPair> pairs;
  if (text.empty()) return DefaultCorrelationPairs();
  for (const auto& item : SplitCsvLine(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      Fail(ErrorKind::kValidation,
           fmt::format("pair '{}' must look like X:Y", item));
    }
    pairs.emplace_back(item.substr(0, colon), item.substr(colon + 1));
  }
  return pairs;
}

CommandOutcome RunCorrelate(const RunConfig& config,
                            std::vector<CorrelationResult>* results_out) {
  Require(!config.scores.empty(), "--scores is required");
  const SystemMetricsTable table = IngestExternalScores(
      config.scores, DetectScoreSchema(config.scores));
  const auto pairs = ParsePairs(config.pairs);
  auto results = CorrelateTable(table, pairs);

  Json report = ReportHeader(config);
  report["scores"] = config.scores.filename().generic_string();
  report["systems"] = table.rows.size();
  Json list = Json::array();
  Json matrix;
  for (const auto& r : results) {
    Json item;
    item["x"] = r.x_column;
    item["y"] = r.y_column;
    item["r"] = r.r;
    item["n"] = r.n;
    item["warnings"] = r.warnings;
    list.push_back(std::move(item));
    matrix[r.x_column][r.y_column] = r.r;
  }
  report["correlations"] = std::move(list);
  report["matrix"] = std::move(matrix);

  CommandOutcome outcome;
  if (!config.out.empty()) {
    EnsureDirectory(config.out);
    if (config.emit_scatter) {
      Json files = Json::array();
      for (const auto& r : results) {
        const std::string name =
            fmt::format("scatter_{}__{}.csv", r.x_column, r.y_column);
        std::ofstream out(config.out / name, std::ios::trunc);
        if (!out) Fail(ErrorKind::kIo, fmt::format("cannot write {}", name));
        out << "system," << r.x_column << ',' << r.y_column << '\n';
        for (const auto& p : r.scatter) {
          out << p.system << ',' << Json(p.x).dump() << ',' << Json(p.y).dump()
              << '\n';
        }
        files.push_back(name);
      }
      report["scatter_files"] = std::move(files);
    }
  }
  if (!config.out.empty() || !config.report.empty()) {
    outcome.report_path = ReportPath(config, "correlation.json");
    WriteReport(report, outcome.report_path);
  }
  outcome.report = std::move(report);
  if (results_out != nullptr) *results_out = std::move(results);
  return outcome;
}

CommandOutcome RunCommand(const RunConfig& config) {
  switch (config.command) {
    case Command::kAnonymize: return RunAnonymize(config);
    case Command::kEmbed: return RunEmbed(config);
    case Command::kEvaluate: return RunEvaluate(config);
    case Command::kCorrelate: return RunCorrelate(config);
  }
  Fail(ErrorKind::kValidation, "unknown command");
}

}  // namespace sanon
