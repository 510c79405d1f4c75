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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nfl/errors.hpp"
#include "nfl/learners.hpp"
#include "nfl/olea.hpp"
#include "nfl/parallel.hpp"
#include "nfl/runner.hpp"

namespace nfl {

namespace {

using nlohmann::json;

const std::vector<std::string> kExperiments = {
    "nfl-f-average", "nfl-uniform-prior", "prior-average", "counterexample", "prior-witness",
    "head-to-head",  "ots-vs-empirical",  "lln",           "olea-gap",       "olea-embedding",
};

const std::set<std::string> kFields = {
    "experiment", "x_size",     "y_size", "m",         "sampling", "replacement", "empty_ots",
    "force",      "loss",       "learners", "datasets", "hypothesis", "target",   "seeds",
    "horizon",    "sequences",  "eta",    "seed",      "n_samples", "out",        "workers",
};

[[noreturn]] void field_error(const std::string& field, const std::string& message) {
  throw ParseError("field '" + field + "': " + message);
}

std::uint64_t get_count(const json& value, const std::string& field) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    field_error(field, "expected a non-negative integer, got " + value.dump());
  }
  return value.get<std::uint64_t>();
}

std::vector<std::size_t> get_labels(const json& value, const std::string& field) {
  if (!value.is_array()) field_error(field, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(get_count(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Rational get_rational(const json& value, const std::string& field) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (!value.is_string()) field_error(field, "expected a rational such as \"1/3\"");
  try {
    return Rational::parse(value.get<std::string>());
  } catch (const ParseError& e) {
    field_error(field, e.what());
  }
}

// Defaults that depend on the experiment.
void apply_defaults(ExperimentConfig& c) {
  const std::string& e = c.experiment;
  const std::vector<std::string> five = {"majority", "anti-majority", "constant:0", "constant:1",
                                         "random"};
  if (e == "nfl-f-average") {
    c.x_size = 4;
    c.m = 1;
    c.learners = five;
  } else if (e == "nfl-uniform-prior") {
    c.x_size = 4;
    c.m = 1;
    c.learners = five;
  } else if (e == "prior-average") {
    c.x_size = 4;
    c.m = 1;
    c.learners = {"majority", "anti-majority"};
    c.n_samples = 1000;
  } else if (e == "counterexample" || e == "prior-witness") {
    c.x_size = 5;
    c.m = 3;
    c.replacement = Replacement::kWithout;
  } else if (e == "head-to-head") {
    c.x_size = 5;
    c.m = 3;
    c.learners = {"majority", "constant:1", "cv:min:majority,anti-majority",
                  "cv:max:majority,anti-majority"};
  } else if (e == "ots-vs-empirical") {
    c.x_size = 5;
    c.m = 3;
  } else if (e == "lln") {
    c.x_size = 1000;
    c.m = 100;
    c.n_samples = 10000;
  } else if (e == "olea-gap") {
    c.horizon = 10;
  } else if (e == "olea-embedding") {
    c.m = 3;
    c.n_samples = 1000;
  }
}

bool uses_learners(const std::string& e) {
  return e == "nfl-f-average" || e == "nfl-uniform-prior" || e == "prior-average" ||
         e == "head-to-head";
}

bool enumerates_functions(const std::string& e) {
  return e != "lln" && e != "olea-gap" && e != "olea-embedding";
}

bool needs_binary_learner(const std::string& name) { return name.rfind("constant:", 0) != 0; }

}  // namespace

const std::vector<std::string>& experiment_names() { return kExperiments; }

SamplingDistribution ExperimentConfig::pi() const {
  if (sampling.empty()) return SamplingDistribution::uniform(x_size);
  return SamplingDistribution(sampling);
}

EngineOptions ExperimentConfig::engine_options() const {
  EngineOptions o;
  o.replacement = replacement;
  o.empty_ots = empty_ots;
  o.workers = workers;
  return o;
}

json ExperimentConfig::echo() const {
  json j;
  j["experiment"] = experiment;
  j["x_size"] = x_size;
  j["y_size"] = y_size;
  j["m"] = m;
  if (sampling.empty()) {
    j["sampling"] = "uniform";
  } else {
    j["sampling"] = json::array();
    for (const auto& w : sampling) j["sampling"].push_back(w.str());
  }
  j["replacement"] = replacement == Replacement::kWith ? "with" : "without";
  j["empty_ots"] = empty_ots == EmptyOtsPolicy::kAbort ? "abort" : "exclude";
  j["force"] = force;
  j["loss"] = loss;
  j["learners"] = learners;
  j["datasets"] = json::array();
  for (const auto& d : datasets) {
    json pairs = json::array();
    for (const auto& p : d) pairs.push_back({p.x, p.y});
    j["datasets"].push_back(pairs);
  }
  j["hypothesis"] = hypothesis;
  j["target"] = target;
  j["seeds"] = seeds;
  j["horizon"] = horizon;
  j["sequences"] = sequences;
  j["eta"] = eta.str();
  j["seed"] = seed;
  j["n_samples"] = n_samples;
  j["out"] = out_dir;
  j["workers"] = workers;
  return j;
}

void validate_config(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  if (std::find(kExperiments.begin(), kExperiments.end(), e) == kExperiments.end()) {
    field_error("experiment", "unknown experiment '" + e + "'");
  }
  if (c.workers == 0) field_error("workers", "must be at least 1");
  if (e == "olea-gap") {
    if (c.horizon == 0 || c.horizon > kMaxGapHorizon) {
      field_error("horizon", "must lie in [1, " + std::to_string(kMaxGapHorizon) + "] (4^n pairs)");
    }
    return;
  }
  if (e == "olea-embedding") {
    if (c.m == 0) field_error("m", "must be positive");
    if (c.sequences == 0) field_error("sequences", "must be positive");
    if (c.eta.sign() <= 0) field_error("eta", "must be positive");
    // Exhaustive check enumerates (2^(m+1))^K considered-function tuples.
    if ((c.m + 1) * c.sequences > 20) {
      field_error("m", "window of " + std::to_string(c.m + 1) + " with " +
                           std::to_string(c.sequences) + " sequences exceeds the 2^20 budget");
    }
    return;
  }

  if (c.x_size == 0) field_error("x_size", "must be positive");
  if (c.y_size == 0) field_error("y_size", "must be positive");
  if (c.m == 0) field_error("m", "must be positive");
  if (c.replacement == Replacement::kWithout && c.m > c.x_size) {
    field_error("m", "without replacement m must not exceed x_size");
  }
  if (!c.sampling.empty()) {
    if (c.sampling.size() != c.x_size) field_error("sampling", "expected one weight per input");
    try {
      SamplingDistribution check(c.sampling);
    } catch (const Error& err) {
      field_error("sampling", err.what());
    }
  }
  try {
    make_loss(c.loss, c.y_size);
  } catch (const Error& err) {
    field_error("loss", err.what());
  }
  if (enumerates_functions(e)) {
    try {
      c.domain().function_count();
    } catch (const BudgetExceededError& err) {
      field_error("x_size", err.what());
    }
  }

  if (uses_learners(e)) {
    if (c.learners.empty()) field_error("learners", "at least one learner is required");
    for (std::size_t i = 0; i < c.learners.size(); ++i) {
      const std::string field = "learners[" + std::to_string(i) + "]";
      try {
        make_learner(c.learners[i]);
      } catch (const Error& err) {
        field_error(field, err.what());
      }
      if (c.y_size != 2 && needs_binary_learner(c.learners[i])) {
        field_error(field, "'" + c.learners[i] + "' requires y_size = 2");
      }
      if (!needs_binary_learner(c.learners[i])) {
        const auto label = std::stoull(c.learners[i].substr(9));
        if (label >= c.y_size) field_error(field, "label outside Y");
      }
    }
  }

  if (e == "counterexample" || e == "prior-witness") {
    if (c.y_size != 2) field_error("y_size", e + " requires binary labels");
    if (c.m % 2 == 0) field_error("m", e + " requires odd m, got " + std::to_string(c.m));
    if (c.loss != "zero-one") field_error("loss", e + " uses the zero-one loss");
  }
  if (e == "prior-average" && c.n_samples > 0) {
    try {
      (void)sample_random_prior(c.domain(), 0);
    } catch (const Error& err) {
      field_error("x_size", err.what());
    }
  }
  if (e == "lln") {
    if (c.x_size < 10 * c.m) field_error("m", "requires x_size >= 10 m");
    if (c.n_samples < 2) field_error("n_samples", "needs at least 2 samples");
  }
  if (e == "nfl-uniform-prior") {
    for (std::size_t i = 0; i < c.datasets.size(); ++i) {
      const std::string field = "datasets[" + std::to_string(i) + "]";
      if (c.datasets[i].empty()) field_error(field, "empty dataset");
      for (const auto& p : c.datasets[i]) {
        if (p.x >= c.x_size || p.y >= c.y_size) field_error(field, "pair outside the domain");
      }
    }
  }
  auto check_outputs = [&](const std::vector<std::size_t>& v, const std::string& field) {
    if (v.empty()) return;
    if (v.size() != c.x_size) field_error(field, "expected x_size = " + std::to_string(c.x_size) + " entries");
    for (auto y : v) {
      if (y >= c.y_size) field_error(field, "label outside Y");
    }
  };
  check_outputs(c.hypothesis, "hypothesis");
  check_outputs(c.target, "target");
}

ExperimentConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kFields.count(key)) field_error(key, "unknown field");
  }
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    field_error("experiment", "required string, one of the names printed by `list`");
  }

  ExperimentConfig c;
  c.experiment = doc["experiment"].get<std::string>();
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    field_error("experiment", "unknown experiment '" + c.experiment + "'");
  }
  apply_defaults(c);
  c.workers = available_workers();

  if (doc.contains("x_size")) c.x_size = get_count(doc["x_size"], "x_size");
  if (doc.contains("y_size")) c.y_size = get_count(doc["y_size"], "y_size");
  if (doc.contains("m")) c.m = get_count(doc["m"], "m");
  if (doc.contains("sampling")) {
    const auto& s = doc["sampling"];
    if (s.is_string() && s.get<std::string>() == "uniform") {
      c.sampling.clear();
    } else if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        c.sampling.push_back(get_rational(s[i], "sampling[" + std::to_string(i) + "]"));
      }
    } else {
      field_error("sampling", "expected \"uniform\" or an array of rationals");
    }
  }
  if (doc.contains("replacement")) {
    const auto& r = doc["replacement"];
    if (r == "with") {
      c.replacement = Replacement::kWith;
    } else if (r == "without") {
      c.replacement = Replacement::kWithout;
    } else {
      field_error("replacement", "expected \"with\" or \"without\"");
    }
  }
  if (doc.contains("empty_ots")) {
    const auto& r = doc["empty_ots"];
    if (r == "abort") {
      c.empty_ots = EmptyOtsPolicy::kAbort;
    } else if (r == "exclude") {
      c.empty_ots = EmptyOtsPolicy::kExcludeAndRenormalize;
    } else {
      field_error("empty_ots", "expected \"abort\" or \"exclude\"");
    }
  }
  if (doc.contains("force")) {
    if (!doc["force"].is_boolean()) field_error("force", "expected true or false");
    c.force = doc["force"].get<bool>();
  }
  if (doc.contains("loss")) {
    if (!doc["loss"].is_string()) field_error("loss", "expected a loss name");
    c.loss = doc["loss"].get<std::string>();
  }
  if (doc.contains("learners")) {
    const auto& l = doc["learners"];
    if (!l.is_array()) field_error("learners", "expected an array of learner names");
    c.learners.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (!l[i].is_string()) field_error("learners[" + std::to_string(i) + "]", "expected a name");
      c.learners.push_back(l[i].get<std::string>());
    }
  }
  if (doc.contains("datasets")) {
    const auto& ds = doc["datasets"];
    if (!ds.is_array()) field_error("datasets", "expected an array of [[x, y], ...] lists");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::string field = "datasets[" + std::to_string(i) + "]";
      if (!ds[i].is_array()) field_error(field, "expected a list of [x, y] pairs");
      std::vector<LabeledPoint> pairs;
      for (std::size_t j = 0; j < ds[i].size(); ++j) {
        const auto& p = ds[i][j];
        const std::string pf = field + "[" + std::to_string(j) + "]";
        if (!p.is_array() || p.size() != 2) field_error(pf, "expected [x, y]");
        pairs.push_back({get_count(p[0], pf), get_count(p[1], pf)});
      }
      c.datasets.push_back(std::move(pairs));
    }
  }
  if (doc.contains("hypothesis")) c.hypothesis = get_labels(doc["hypothesis"], "hypothesis");
  if (doc.contains("target")) c.target = get_labels(doc["target"], "target");
  if (doc.contains("seeds")) {
    for (auto s : get_labels(doc["seeds"], "seeds")) c.seeds.push_back(s);
  }
  if (doc.contains("horizon")) c.horizon = get_count(doc["horizon"], "horizon");
  if (doc.contains("sequences")) c.sequences = get_count(doc["sequences"], "sequences");
  if (doc.contains("eta")) c.eta = get_rational(doc["eta"], "eta");
  if (doc.contains("seed")) c.seed = get_count(doc["seed"], "seed");
  if (doc.contains("n_samples")) c.n_samples = get_count(doc["n_samples"], "n_samples");
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) field_error("out", "expected a directory path");
    c.out_dir = doc["out"].get<std::string>();
  }
  if (doc.contains("workers")) {
    c.workers = static_cast<unsigned>(get_count(doc["workers"], "workers"));
  }

  validate_config(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries "at line L, column C".
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  return parse_config_json(doc);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config_text(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace nfl
