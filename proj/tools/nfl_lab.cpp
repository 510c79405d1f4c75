// Copyright 2026 The nfl-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// nfl_lab run --config <file> [--out <dir>] [--seed <int>] [--workers <int>]
// nfl_lab verify-all [--profile default|small]
// nfl_lab list
//
// Exit status: 0 when every check passes, 1 when any check fails, 2 on a
// usage, config or runtime error.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "nfl/errors.hpp"
#include "nfl/learners.hpp"
#include "nfl/parallel.hpp"
#include "nfl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact no-free-lunch and online-learning experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  unsigned workers = 0;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Seed (overrides the config)")->check(CLI::NonNegativeNumber);
  run->add_option("--workers", workers, "Worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify-all", "Run the full verification suite");
  std::string profile = "default";
  verify->add_option("--profile", profile, "default or small")
      ->check(CLI::IsMember({"default", "small"}));
  unsigned verify_workers = nfl::available_workers();
  verify->add_option("--workers", verify_workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "Print the experiment, learner and loss registries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = nfl::parse_config(config_path);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (seed >= 0) {
        config.seed = static_cast<std::uint64_t>(seed);
        config.seeds.clear();
      }
      if (workers > 0) config.workers = workers;
      nfl::validate_config(config);
      const auto bundle = nfl::run_experiment(config);
      for (const auto& v : bundle.verdicts) std::cout << v.to_json().dump() << '\n';
      std::cout << "wrote " << bundle.files.size() << " files and metadata.json to "
                << config.out_dir << '\n';
      return bundle.all_pass() ? 0 : 1;
    }
    if (*verify) {
      const auto results = nfl::verify_all(
          profile == "small" ? nfl::Profile::kSmall : nfl::Profile::kDefault, verify_workers);
      std::cout << nfl::format_summary(results);
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (*list) {
      std::cout << "experiments:\n";
      for (const auto& e : nfl::experiment_names()) std::cout << "  " << e << '\n';
      std::cout << "learners:\n";
      for (const auto& l : nfl::learner_registry_examples()) std::cout << "  " << l << '\n';
      std::cout << "losses:\n  zero-one\n  cyclic\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
