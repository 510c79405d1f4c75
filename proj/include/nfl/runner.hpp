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

// Config-driven experiment execution. A config is a JSON object (see
// docs/config.md); a run writes CSV tables, one verdict record per line in
// verdicts.jsonl and run metadata to metadata.json under the output directory.
// Only metadata.json carries wall time, so everything else is byte-identical
// across reruns with the same config and seed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nfl/costs.hpp"
#include "nfl/domain.hpp"
#include "nfl/nfl_engine.hpp"
#include "nfl/rational.hpp"

namespace nfl {

const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  std::string experiment;
  std::size_t x_size = 0;
  std::size_t y_size = 2;
  std::size_t m = 0;
  std::vector<Rational> sampling;  // empty means uniform
  Replacement replacement = Replacement::kWith;
  EmptyOtsPolicy empty_ots = EmptyOtsPolicy::kAbort;
  bool force = false;
  std::string loss = "zero-one";
  std::vector<std::string> learners;
  // nfl-uniform-prior: explicit datasets; empty means every dataset of size m.
  std::vector<std::vector<LabeledPoint>> datasets;
  std::vector<std::size_t> hypothesis;  // h* outputs; empty means all zeros
  std::vector<std::size_t> target;      // lln target; empty means drawn from the seed
  std::vector<std::uint64_t> seeds;     // lln: one experiment per seed
  std::size_t horizon = 10;
  std::size_t sequences = 2;
  Rational eta{1};
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::string out_dir = "nfl-out";
  unsigned workers = 1;

  FiniteDomain domain() const { return FiniteDomain(x_size, y_size); }
  SamplingDistribution pi() const;
  LossFunction loss_function() const { return make_loss(loss, y_size); }
  EngineOptions engine_options() const;
  // The config with every default filled in, as written to metadata.json.
  nlohmann::json echo() const;
};

// Throws ParseError with a line (malformed JSON) or field (bad value)
// diagnostic.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);

// Re-validates after programmatic edits (CLI overrides).
void validate_config(const ExperimentConfig& config);

enum class Outcome { kPass, kFail, kInfo };

struct Verdict {
  std::string check;
  nlohmann::json params;
  Outcome outcome = Outcome::kInfo;
  nlohmann::json values;   // measured quantities
  nlohmann::json witness;  // null when none
  std::string detail;

  nlohmann::json to_json() const;
};

struct ReportBundle {
  std::vector<Verdict> verdicts;
  // Every emitted file by name relative to the output directory, in order.
  std::map<std::string, std::string> files;
  std::vector<std::filesystem::path> csv_paths;
  nlohmann::json metadata;
  bool all_pass() const;
};

// Runs the experiment. With `write` set, emits the files under config.out_dir.
ReportBundle run_experiment(const ExperimentConfig& config, bool write = true);

enum class Profile { kDefault, kSmall };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// The full verification suite at its stated scale (kDefault) or on domains
// with |X| <= 4 (kSmall). Failures are results, never exceptions.
std::vector<CriterionResult> verify_all(Profile profile, unsigned workers);
std::string format_summary(const std::vector<CriterionResult>& results);

}  // namespace nfl
