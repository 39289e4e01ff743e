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

#ifndef SANON_RUN_CONFIG_H_
#define SANON_RUN_CONFIG_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sanon/anonymizers.h"

namespace sanon {

inline constexpr const char* kToolName = "sanon";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { kAnonymize, kEmbed, kEvaluate, kCorrelate };

std::string_view CommandName(Command command);

// Which audio the attacker enrolls with when measuring privacy EER.
enum class AttackScenario {
  kIgnorant,      // enroll on original audio, test on anonymized audio
  kLazyInformed,  // enroll and test on anonymized audio
};

std::string_view AttackScenarioName(AttackScenario scenario);
AttackScenario ParseAttackScenario(std::string_view name);

struct RunConfig {
  Command command = Command::kAnonymize;
  std::filesystem::path manifest;
  std::filesystem::path root;  // defaults to the manifest's directory
  std::filesystem::path out;
  std::filesystem::path report;  // defaults to a file inside `out`
  AnonymizerConfig anonymizer;
  int workers = 1;
  std::filesystem::path pool;
  std::filesystem::path trials;
  std::filesystem::path scores;
  std::string pairs;  // "X:Y,X:Y"; empty selects the default pairs
  bool emit_scatter = false;

  // evaluate
  std::filesystem::path anon_manifest;
  std::filesystem::path anon_root;
  std::filesystem::path orig_embeddings;
  std::filesystem::path anon_embeddings;
  AttackScenario attack = AttackScenario::kIgnorant;

  uint64_t seed() const { return anonymizer.seed; }
};

// Applies one `key = value` setting. Keys mirror the RunConfig and
// AnonymizerConfig field names; ranges are written `lo,hi`. Throws
// kValidation for unknown keys or malformed values.
void ApplyConfigSetting(const std::string& key, const std::string& value,
                        RunConfig* config);

// Reads a config file of `key = value` lines; `#` starts a comment.
void ApplyConfigFile(const std::filesystem::path& path, RunConfig* config);

// Settings that determine results, in a fixed key order. Worker count and
// output locations are left out so reports do not depend on them.
nlohmann::ordered_json ConfigToJson(const RunConfig& config);
std::string ConfigHash(const RunConfig& config);

}  // namespace sanon

#endif  // SANON_RUN_CONFIG_H_
