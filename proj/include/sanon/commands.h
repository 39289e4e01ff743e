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

#ifndef SANON_COMMANDS_H_
#define SANON_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "sanon/error.h"
#include "sanon/metrics.h"
#include "sanon/run_config.h"

namespace sanon {

// Process exit statuses.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitPartialFailure = 3;
inline constexpr int kExitIo = 4;

int ExitCodeFor(ErrorKind kind);

struct CommandOutcome {
  int exit_code = kExitSuccess;
  nlohmann::ordered_json report;
  std::filesystem::path report_path;
};

// Anonymizes every utterance in the manifest. Waveform methods mirror the
// input layout under `out` and write `out/manifest.csv` for the anonymized
// set; embedding methods write `out/anonymized_embeddings.saeb`. A failed
// utterance is reported and skipped; the exit code is then 3.
CommandOutcome RunAnonymize(const RunConfig& config);

// Baseline embeddings for every utterance, written to
// `out/embeddings.saeb` keyed by utt_id.
CommandOutcome RunEmbed(const RunConfig& config);

struct EvaluationSummary {
  double eer_original = 0.0;
  double eer_anonymized = 0.0;
  Gvd gvd = Gvd::Decibels(0.0);
  size_t mated_trials = 0;
  size_t nonmated_trials = 0;
};

// Privacy EER before and after anonymization plus GVD between the original
// and anonymized similarity matrices.
CommandOutcome RunEvaluate(const RunConfig& config,
                           EvaluationSummary* summary = nullptr);

// Pearson correlations over a per-system metrics table.
CommandOutcome RunCorrelate(
    const RunConfig& config,
    std::vector<CorrelationResult>* results = nullptr);

CommandOutcome RunCommand(const RunConfig& config);

// All same-speaker cross-utterance pairs as mated trials plus an equal number
// of seeded random different-speaker pairs.
TrialList GenerateTrials(const std::vector<UtteranceRecord>& records,
                         uint64_t seed);

std::vector<ColumnPair> ParsePairs(const std::string& text);

}  // namespace sanon

#endif  // SANON_COMMANDS_H_
