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

#include <deque>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sanon/commands.h"
#include "sanon/error.h"
#include "sanon/run_config.h"

namespace {

struct FlagBinding {
  std::string key;  // config key understood by ApplyConfigSetting
  std::string value;
  CLI::Option* option = nullptr;
};

// Registers string-valued flags. Values are routed through ApplyConfigSetting
// so flags and config files parse alike. A deque keeps the bound strings at
// stable addresses.
void AddFlags(CLI::App* app, std::deque<FlagBinding>* flags,
              const std::vector<std::pair<std::string, std::string>>& specs) {
  for (const auto& [flag, key] : specs) {
    flags->push_back({key, "", nullptr});
    flags->back().option = app->add_option(flag, flags->back().value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker anonymization toolkit and evaluation harness"};
  app.set_version_flag("--version", std::string(sanon::kToolVersion));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> common = {
      {"--manifest", "manifest"},  {"--root", "root"},
      {"--out", "out"},            {"--report", "report"},
      {"--method", "method"},      {"--seed", "seed"},
      {"--workers", "workers"},    {"--pool", "pool"},
      {"--trials", "trials"},      {"--scores", "scores"},
      {"--pairs", "pairs"},
  };
  const std::vector<std::pair<std::string, std::string>> evaluate_extra = {
      {"--anon-manifest", "anon_manifest"},
      {"--anon-root", "anon_root"},
      {"--orig-embeddings", "orig_embeddings"},
      {"--anon-embeddings", "anon_embeddings"},
      {"--attack-scenario", "attack_scenario"},
  };

  struct Sub {
    sanon::Command command;
    CLI::App* app;
    std::deque<FlagBinding> flags;
    std::string config_path;
    bool emit_scatter = false;
    CLI::Option* scatter_option = nullptr;
  };
  std::deque<Sub> subs;
  const std::pair<sanon::Command, const char*> defs[] = {
      {sanon::Command::kAnonymize, "Anonymize every utterance in a manifest"},
      {sanon::Command::kEmbed, "Extract baseline speaker embeddings"},
      {sanon::Command::kEvaluate, "Privacy EER and GVD of an anonymized set"},
      {sanon::Command::kCorrelate, "Correlate per-system metric columns"},
  };
  for (const auto& [command, help] : defs) {
    Sub& sub = subs.emplace_back();
    sub.command = command;
    sub.app = app.add_subcommand(std::string(sanon::CommandName(command)), help);
    AddFlags(sub.app, &sub.flags, common);
    if (command == sanon::Command::kEvaluate) {
      AddFlags(sub.app, &sub.flags, evaluate_extra);
    }
    sub.app->add_option("--config", sub.config_path, "key = value settings file");
    sub.scatter_option =
        sub.app->add_flag("--emit-scatter", sub.emit_scatter,
                          "Write one scatter CSV per column pair");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sanon::kExitValidation;
  }

  for (Sub& sub : subs) {
    if (!sub.app->parsed()) continue;
    try {
      sanon::RunConfig config;
      config.command = sub.command;
      if (!sub.config_path.empty()) {
        sanon::ApplyConfigFile(sub.config_path, &config);
      }
      for (const FlagBinding& f : sub.flags) {
        if (f.option->count() > 0) {
          sanon::ApplyConfigSetting(f.key, f.value, &config);
        }
      }
      if (sub.scatter_option->count() > 0) config.emit_scatter = true;
      const sanon::CommandOutcome outcome = sanon::RunCommand(config);
      if (!outcome.report_path.empty()) {
        std::cout << outcome.report_path.string() << '\n';
      } else {
        std::cout << outcome.report.dump(2) << '\n';
      }
      return outcome.exit_code;
    } catch (const sanon::Error& e) {
      std::cerr << fmt::format("sanon: {} error: {}\n",
                               sanon::ErrorKindName(e.kind()), e.what());
      return sanon::ExitCodeFor(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "sanon: " << e.what() << '\n';
      return sanon::kExitIo;
    }
  }
  return sanon::kExitValidation;
}
