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

#include "sanon/run_config.h"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "sanon/csv.h"
#include "sanon/error.h"
#include "sanon/random.h"

namespace sanon {

std::string_view CommandName(Command command) {
  switch (command) {
    case Command::kAnonymize: return "anonymize";
    case Command::kEmbed: return "embed";
    case Command::kEvaluate: return "evaluate";
    case Command::kCorrelate: return "correlate";
  }
  return "unknown";
}

std::string_view AttackScenarioName(AttackScenario scenario) {
  return scenario == AttackScenario::kIgnorant ? "ignorant" : "lazy_informed";
}

AttackScenario ParseAttackScenario(std::string_view name) {
  if (name == "ignorant") return AttackScenario::kIgnorant;
  if (name == "lazy_informed") return AttackScenario::kLazyInformed;
  Fail(ErrorKind::kValidation, fmt::format("unknown attack scenario '{}'", name));
}

namespace {

double ToDouble(const std::string& key, const std::string& value) {
  double v;
  if (!ParseDouble(value, &v)) {
    Fail(ErrorKind::kValidation,
         fmt::format("config '{}': '{}' is not a number", key, value));
  }
  return v;
}

template <typename Int>
Int ToInt(const std::string& key, const std::string& value) {
  Int v{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Fail(ErrorKind::kValidation,
         fmt::format("config '{}': '{}' is not an integer", key, value));
  }
  return v;
}

std::pair<double, double> ToRange(const std::string& key,
                                  const std::string& value) {
  const auto parts = SplitCsvLine(value);
  if (parts.size() != 2) {
    Fail(ErrorKind::kValidation,
         fmt::format("config '{}': expected 'lo,hi', got '{}'", key, value));
  }
  return {ToDouble(key, parts[0]), ToDouble(key, parts[1])};
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  Fail(ErrorKind::kValidation,
       fmt::format("config '{}': '{}' is not a boolean", key, value));
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ApplyConfigSetting(const std::string& key, const std::string& value,
                        RunConfig* config) {
  auto& anon = config->anonymizer;
  if (key == "method") {
    anon.method = ParseMethod(value);
  } else if (key == "semitone_range") {
    anon.semitone_range = ToRange(key, value);
  } else if (key == "mcadams_alpha_range") {
    anon.mcadams_alpha_range = ToRange(key, value);
  } else if (key == "pool_farthest_k") {
    anon.pool_farthest_k = ToInt<int>(key, value);
  } else if (key == "pool_average_m") {
    anon.pool_average_m = ToInt<int>(key, value);
  } else if (key == "cosine_threshold") {
    anon.cosine_threshold = ToDouble(key, value);
  } else if (key == "randomization_scope") {
    anon.randomization_scope = ParseScope(value);
  } else if (key == "seed") {
    anon.seed = ToInt<uint64_t>(key, value);
  } else if (key == "workers") {
    config->workers = ToInt<int>(key, value);
  } else if (key == "manifest") {
    config->manifest = value;
  } else if (key == "root") {
    config->root = value;
  } else if (key == "out") {
    config->out = value;
  } else if (key == "report") {
    config->report = value;
  } else if (key == "pool") {
    config->pool = value;
  } else if (key == "trials") {
    config->trials = value;
  } else if (key == "scores") {
    config->scores = value;
  } else if (key == "pairs") {
    config->pairs = value;
  } else if (key == "emit_scatter") {
    config->emit_scatter = ToBool(key, value);
  } else if (key == "anon_manifest") {
    config->anon_manifest = value;
  } else if (key == "anon_root") {
    config->anon_root = value;
  } else if (key == "attack_scenario") {
    config->attack = ParseAttackScenario(value);
  } else {
    Fail(ErrorKind::kValidation, fmt::format("unknown config key '{}'", key));
  }
}

void ApplyConfigFile(const std::filesystem::path& path, RunConfig* config) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorKind::kValidation,
           fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    }
    ApplyConfigSetting(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)),
                       config);
  }
}

nlohmann::ordered_json ConfigToJson(const RunConfig& config) {
  const auto& a = config.anonymizer;
  nlohmann::ordered_json j;
  j["command"] = CommandName(config.command);
  j["method"] = MethodName(a.method);
  j["semitone_range"] = {a.semitone_range.first, a.semitone_range.second};
  j["mcadams_alpha_range"] = {a.mcadams_alpha_range.first,
                              a.mcadams_alpha_range.second};
  j["pool_farthest_k"] = a.pool_farthest_k;
  j["pool_average_m"] = a.pool_average_m;
  j["cosine_threshold"] = a.cosine_threshold;
  j["randomization_scope"] = ScopeName(a.EffectiveScope());
  j["seed"] = a.seed;
  j["attack_scenario"] = AttackScenarioName(config.attack);
  j["pairs"] = config.pairs;
  return j;
}

std::string ConfigHash(const RunConfig& config) {
  return fmt::format("{:016x}", Fnv1a64(ConfigToJson(config).dump()));
}

}  // namespace sanon
