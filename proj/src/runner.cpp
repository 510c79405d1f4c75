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

#include "nfl/runner.hpp"

#include <gmp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "nfl/errors.hpp"
#include "nfl/learners.hpp"
#include "nfl/olea.hpp"
#include "nfl/parallel.hpp"
#include "nfl/rng.hpp"

namespace nfl {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string brief(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-';
    out.push_back(keep ? c : '_');
  }
  return out;
}

// Quotes a CSV field when it contains a separator (cv learner names do).
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string distribution_csv(const CostDistribution& dist) {
  std::ostringstream os;
  os << "cost,probability\n";
  for (const auto& [cost, p] : dist.atoms()) os << cost.str() << ',' << p.str() << '\n';
  return os.str();
}

json common_params(const ExperimentConfig& c) {
  json p;
  p["x_size"] = c.x_size;
  p["y_size"] = c.y_size;
  p["m"] = c.m;
  p["loss"] = c.loss;
  p["replacement"] = c.replacement == Replacement::kWith ? "with" : "without";
  if (c.sampling.empty()) {
    p["sampling"] = "uniform";
  } else {
    p["sampling"] = json::array();
    for (const auto& w : c.sampling) p["sampling"].push_back(w.str());
  }
  return p;
}

Verdict verdict(std::string check, json params, bool pass, std::string detail = {}) {
  Verdict v;
  v.check = std::move(check);
  v.params = std::move(params);
  v.outcome = pass ? Outcome::kPass : Outcome::kFail;
  v.detail = std::move(detail);
  return v;
}

std::vector<Learner> build_learners(const ExperimentConfig& c) {
  std::vector<Learner> out;
  for (const auto& name : c.learners) out.push_back(make_learner(name));
  return out;
}

StochasticHypothesis hypothesis_of(const ExperimentConfig& c) {
  std::vector<std::size_t> outputs = c.hypothesis;
  if (outputs.empty()) outputs.assign(c.x_size, 0);
  return StochasticHypothesis::deterministic(c.domain(), outputs);
}

std::string describe_dataset(const Dataset& d) {
  std::string s = "d=[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += ' ';
    s += "(" + std::to_string(d.pairs()[i].x) + "," + std::to_string(d.pairs()[i].y) + ")";
  }
  return s + "]";
}

json discrepancy_json(const NflReport& r) {
  if (!r.discrepancy) return nullptr;
  const auto& d = *r.discrepancy;
  return {{"first_learner", r.learner_names[d.first_learner]},
          {"second_learner", r.learner_names[d.second_learner]},
          {"cost", d.atom.cost.str()},
          {"first_probability", d.atom.first_probability.str()},
          {"second_probability", d.atom.second_probability.str()}};
}

// Every noise-free dataset of size m: input sequences in odometer order, then
// label sequences, skipping label sequences that disagree on a repeated input.
std::vector<Dataset> all_datasets(const FiniteDomain& domain, std::size_t m,
                                  Replacement replacement) {
  std::vector<Dataset> out;
  std::vector<std::size_t> xs(m, 0);
  while (true) {
    bool distinct = true;
    for (std::size_t i = 0; i < m && distinct; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) distinct = distinct && xs[i] != xs[j];
    }
    if (replacement == Replacement::kWith || distinct) {
      std::vector<std::size_t> ys(m, 0);
      while (true) {
        bool consistent = true;
        for (std::size_t i = 0; i < m && consistent; ++i) {
          for (std::size_t j = i + 1; j < m; ++j) {
            if (xs[i] == xs[j] && ys[i] != ys[j]) consistent = false;
          }
        }
        if (consistent) {
          std::vector<LabeledPoint> pairs;
          for (std::size_t i = 0; i < m; ++i) pairs.push_back({xs[i], ys[i]});
          out.emplace_back(std::move(pairs));
        }
        std::size_t k = m;
        while (k > 0 && ys[k - 1] + 1 == domain.y_size()) ys[--k] = 0;
        if (k == 0) break;
        ++ys[k - 1];
      }
    }
    std::size_t k = m;
    while (k > 0 && xs[k - 1] + 1 == domain.x_size()) xs[--k] = 0;
    if (k == 0) break;
    ++xs[k - 1];
  }
  return out;
}

// -- Experiments --------------------------------------------------------------

void run_nfl_f_average(const ExperimentConfig& c, ReportBundle& b) {
  const auto learners = build_learners(c);
  const auto report = nfl_f_average_check(learners, c.domain(), c.m, c.pi(), c.loss_function(),
                                          c.force, c.engine_options());
  for (std::size_t i = 0; i < learners.size(); ++i) {
    b.files["nfl-f-average_" + std::to_string(i) + "_" + file_stem(learners[i].name()) + ".csv"] =
        distribution_csv(report.distributions[i]);
  }
  auto params = common_params(c);
  params["learners"] = c.learners;
  auto v = verdict("nfl-f-average", params, report.pass,
                   report.pass ? "all cost distributions are identical"
                               : "cost distributions differ");
  v.values["atoms"] = report.distributions.empty() ? 0 : report.distributions[0].atoms().size();
  v.witness = discrepancy_json(report);
  b.verdicts.push_back(std::move(v));
}

void run_nfl_uniform_prior(const ExperimentConfig& c, ReportBundle& b) {
  const auto learners = build_learners(c);
  std::vector<Dataset> datasets;
  if (c.datasets.empty()) {
    datasets = all_datasets(c.domain(), c.m, c.replacement);
  } else {
    for (const auto& pairs : c.datasets) datasets.emplace_back(pairs);
  }

  std::ostringstream csv;
  csv << "dataset,learner,cost,probability\n";
  std::size_t passed = 0;
  std::size_t skipped = 0;
  json witness = nullptr;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& d = datasets[i];
    if (d.covers(c.domain()) && c.empty_ots == EmptyOtsPolicy::kExcludeAndRenormalize) {
      ++skipped;
      continue;
    }
    const auto report = nfl_uniform_prior_check(learners, c.domain(), d, c.pi(), c.loss_function(),
                                                c.force, c.engine_options());
    for (std::size_t l = 0; l < learners.size(); ++l) {
      for (const auto& [cost, p] : report.distributions[l].atoms()) {
        csv << i << ',' << csv_field(learners[l].name()) << ',' << cost.str() << ',' << p.str() << '\n';
      }
    }
    if (report.pass) {
      ++passed;
    } else if (witness.is_null()) {
      witness = discrepancy_json(report);
      witness["dataset"] = describe_dataset(d);
    }
  }
  b.files["nfl-uniform-prior.csv"] = csv.str();

  auto params = common_params(c);
  params["learners"] = c.learners;
  const std::size_t checked = datasets.size() - skipped;
  auto v = verdict("nfl-uniform-prior", params, passed == checked,
                   std::to_string(passed) + " of " + std::to_string(checked) +
                       " datasets give identical cost distributions");
  v.values = {{"datasets", checked}, {"passed", passed}, {"skipped_covering", skipped}};
  v.witness = witness;
  b.verdicts.push_back(std::move(v));
}

void run_prior_average(const ExperimentConfig& c, ReportBundle& b) {
  const auto learners = build_learners(c);
  const auto report = prior_average_check(learners, c.domain(), c.m, c.pi(), c.loss_function(),
                                          c.n_samples, c.seed, c.engine_options());
  std::ostringstream csv;
  csv << "learner,exact_expected_cost,mc_mean,mc_stddev,mc_min,mc_max\n";
  for (const auto& e : report.entries) {
    csv << csv_field(e.learner) << ',' << e.exact_expected_cost.str() << ',' << fmt(e.mc_mean) << ','
        << fmt(e.mc_stddev) << ',' << fmt(e.mc_min) << ',' << fmt(e.mc_max) << '\n';
  }
  b.files["prior-average.csv"] = csv.str();

  auto params = common_params(c);
  params["learners"] = c.learners;
  params["n_samples"] = c.n_samples;
  params["seed"] = c.seed;
  auto exact = verdict("prior-average-exact", params, report.exact_equal,
                       "expected OTS cost under the barycenter prior");
  exact.values["expected_cost"] =
      report.entries.empty() ? "" : report.entries[0].exact_expected_cost.str();
  b.verdicts.push_back(std::move(exact));

  if (c.n_samples > 0) {
    constexpr double kTolerance = 0.02;
    bool ok = true;
    json means = json::object();
    for (const auto& e : report.entries) {
      means[e.learner] = e.mc_mean;
      ok = ok && std::fabs(e.mc_mean - e.exact_expected_cost.to_double()) < kTolerance;
    }
    auto mc = verdict("prior-average-monte-carlo", params, ok,
                      "per-learner mean over sampled priors within 0.02 of the exact value");
    mc.values["means"] = means;
    b.verdicts.push_back(std::move(mc));
  }
}

void run_counterexample(const ExperimentConfig& c, ReportBundle& b) {
  const auto domain = c.domain();
  const auto prior = constant_functions_prior(domain);
  const auto loss = c.loss_function();
  const auto opts = c.engine_options();
  const Rational anti =
      prior_expected_cost(anti_phi_learner(), prior, c.m, c.pi(), loss, true, opts);
  const Rational cv = prior_expected_cost(phi_learner(), prior, c.m, c.pi(), loss, true, opts);
  const Rational rnd =
      prior_expected_cost(random_guess_learner(), prior, c.m, c.pi(), loss, true, opts);

  std::ostringstream csv;
  csv << "learner,expected_ots_cost\n";
  csv << csv_field(anti_phi_learner().name()) << ',' << anti.str() << '\n';
  csv << csv_field(phi_learner().name()) << ',' << cv.str() << '\n';
  csv << "random," << rnd.str() << '\n';
  b.files["counterexample.csv"] = csv.str();

  auto params = common_params(c);
  params["prior"] = "uniform over the constant functions";
  auto v1 = verdict("counterexample-anti-cv", params, anti == Rational(1),
                    "anti-cross-validation expected OTS cost " + anti.str() + ", expected 1/1");
  v1.values = {{"anti_cv", anti.str()}, {"cv", cv.str()}};
  b.verdicts.push_back(std::move(v1));
  auto v2 = verdict("counterexample-random", params, rnd == Rational(1, 2),
                    "random guessing expected OTS cost " + rnd.str() + ", expected 1/2");
  v2.values = {{"random", rnd.str()}};
  b.verdicts.push_back(std::move(v2));
}

void run_prior_witness(const ExperimentConfig& c, ReportBundle& b) {
  const auto opts = c.engine_options();
  auto params = common_params(c);

  std::optional<Rational> constant;
  {
    Verdict v;
    v.check = "phi-sum-constant";
    v.params = params;
    try {
      const auto report = phi_sum_constant(c.domain(), c.m, c.pi(), opts);
      constant = report.constant;
      const bool half = report.constant == Rational(1, 2);
      const bool one = report.constant == Rational(1);
      v.outcome = Outcome::kPass;
      v.values = {{"constant", report.constant.str()},
                  {"differing_pairs", report.differing_pairs},
                  {"agreeing_pairs", report.agreeing_pairs},
                  {"stated_value", "1/2"},
                  {"matches_stated_value", half},
                  {"complementarity_value", "1/1"},
                  {"matches_complementarity_value", one}};
      v.detail = "sum of cv and anti-cv expected OTS costs is " + report.constant.str() +
                 " on every pair with differing selections; " +
                 (half ? "matches" : "differs from") + " the stated 1/2, " +
                 (one ? "matches" : "differs from") + " the complementarity value 1/1";
      std::ostringstream csv;
      csv << "sum,differing_pairs,agreeing_pairs\n"
          << report.constant.str() << ',' << report.differing_pairs << ','
          << report.agreeing_pairs << '\n';
      b.files["phi-sum.csv"] = csv.str();
    } catch (const ConsistencyError& e) {
      v.outcome = Outcome::kFail;
      v.detail = e.what();
    }
    b.verdicts.push_back(std::move(v));
  }

  Verdict w;
  w.check = "prior-witness";
  w.params = params;
  try {
    const auto witness = prior_witness_search(c.domain(), c.m, c.pi(), c.loss_function(), opts);
    w.outcome = Outcome::kPass;
    w.witness = {{"target", witness.target.str()},
                 {"anti_cv_expected_cost", witness.anti_cv_expected_cost.str()},
                 {"cv_expected_cost", witness.cv_expected_cost.str()}};
    w.detail = "delta prior on f=" + witness.target.str() + " gives anti-cv cost " +
               witness.anti_cv_expected_cost.str();
    std::ostringstream csv;
    csv << "target,anti_cv_expected_cost,cv_expected_cost\n"
        << witness.target.str() << ',' << witness.anti_cv_expected_cost.str() << ','
        << witness.cv_expected_cost.str() << '\n';
    b.files["prior-witness.csv"] = csv.str();

    const bool cv_above = witness.cv_expected_cost > Rational(1, 2);
    const bool required = constant && *constant == Rational(1);
    auto v = verdict("witness-cv-above-half", params, !required || cv_above,
                     "cv expected OTS cost " + witness.cv_expected_cost.str() +
                         (required ? " must exceed 1/2 since the sum constant is 1/1"
                                   : " (not required to exceed 1/2: sum constant is not 1/1)"));
    const Rational sum = witness.cv_expected_cost + witness.anti_cv_expected_cost;
    v.values = {{"cv_expected_cost", witness.cv_expected_cost.str()},
                {"sum_at_witness", sum.str()}};
    b.verdicts.push_back(std::move(w));
    b.verdicts.push_back(std::move(v));
  } catch (const ConsistencyError& e) {
    w.outcome = Outcome::kFail;
    w.detail = e.what();
    b.verdicts.push_back(std::move(w));
  }
}

void run_head_to_head(const ExperimentConfig& c, ReportBundle& b) {
  const auto learners = build_learners(c);
  const auto loss = c.loss_function();
  const auto opts = c.engine_options();
  const auto nfl = nfl_f_average_check(learners, c.domain(), c.m, c.pi(), loss, c.force, opts);

  auto params = common_params(c);
  std::size_t asymmetric = 0;
  std::size_t pairs = 0;
  bool marginals_ok = nfl.pass;
  json first_witness = nullptr;
  for (std::size_t i = 0; i < learners.size(); ++i) {
    for (std::size_t j = i + 1; j < learners.size(); ++j) {
      ++pairs;
      const auto r = joint_head_to_head(learners[i], learners[j], c.domain(), c.m, c.pi(), loss,
                                        opts);
      std::ostringstream csv;
      csv << "cost_a,cost_b,probability\n";
      for (const auto& [costs, p] : r.joint.atoms()) {
        csv << costs.first.str() << ',' << costs.second.str() << ',' << p.str() << '\n';
      }
      b.files["head-to-head_" + std::to_string(i) + "-" + std::to_string(j) + "_" +
              file_stem(learners[i].name()) + "_vs_" + file_stem(learners[j].name()) + ".csv"] =
          csv.str();

      auto pair_params = params;
      pair_params["learner_a"] = r.learner_a;
      pair_params["learner_b"] = r.learner_b;
      const bool ok = r.joint.marginal_first() == nfl.distributions[i] &&
                      r.joint.marginal_second() == nfl.distributions[j] && nfl.pass &&
                      r.joint.total_mass() == Rational(1);
      marginals_ok = marginals_ok && ok;
      b.verdicts.push_back(verdict("head-to-head-marginals", pair_params, ok,
                                   ok ? "both marginals equal the common f-averaged distribution"
                                      : "marginal differs from the f-averaged distribution"));

      Verdict s;
      s.check = "head-to-head-swap";
      s.params = pair_params;
      s.outcome = Outcome::kInfo;
      s.values["swap_symmetric"] = r.swap_symmetric;
      if (r.witness) {
        ++asymmetric;
        s.witness = {{"cost_a", r.witness->cost_a.str()},
                     {"cost_b", r.witness->cost_b.str()},
                     {"probability", r.witness->probability.str()},
                     {"swapped_probability", r.witness->swapped_probability.str()}};
        s.detail = "P(C_a=" + r.witness->cost_a.str() + ", C_b=" + r.witness->cost_b.str() +
                   ") = " + r.witness->probability.str() + " but " +
                   r.witness->swapped_probability.str() + " after swapping the learners";
        if (first_witness.is_null()) {
          first_witness = s.witness;
          first_witness["learner_a"] = r.learner_a;
          first_witness["learner_b"] = r.learner_b;
        }
      } else {
        s.detail = "joint is invariant under swapping the learners";
      }
      b.verdicts.push_back(std::move(s));
    }
  }
  Verdict summary;
  summary.check = "head-to-head-summary";
  summary.params = params;
  summary.params["learners"] = c.learners;
  summary.outcome = marginals_ok ? Outcome::kPass : Outcome::kFail;
  summary.values = {{"pairs", pairs}, {"asymmetric_pairs", asymmetric}};
  summary.witness = first_witness;
  summary.detail = std::to_string(asymmetric) + " of " + std::to_string(pairs) +
                   " pairs have a swap-asymmetric joint";
  b.verdicts.push_back(std::move(summary));
}

void run_ots_vs_empirical(const ExperimentConfig& c, ReportBundle& b) {
  const auto h = hypothesis_of(c);
  const auto table = ots_vs_empirical_table(h, c.domain(), c.m, c.pi(), c.loss_function(),
                                            c.engine_options());
  std::ostringstream csv;
  csv << "empirical_cost,expected_ots_cost,mass\n";
  for (const auto& r : table.rows) {
    csv << r.empirical_cost.str() << ',' << r.expected_ots_cost.str() << ',' << r.mass.str()
        << '\n';
  }
  b.files["ots-vs-empirical.csv"] = csv.str();

  auto params = common_params(c);
  std::vector<std::size_t> outputs = c.hypothesis;
  if (outputs.empty()) outputs.assign(c.x_size, 0);
  params["hypothesis"] = outputs;
  const bool ok = table.rows_equal() && table.total_mass() == Rational(1);
  auto v = verdict("ots-vs-empirical", params, ok,
                   ok ? "expected OTS cost is the same for every training-set cost value"
                      : "expected OTS cost varies with the training-set cost");
  v.values = {{"rows", table.rows.size()},
              {"common_value", table.rows.empty() ? "" : table.rows[0].expected_ots_cost.str()},
              {"total_mass", table.total_mass().str()}};
  if (!table.rows_equal()) {
    for (const auto& r : table.rows) {
      if (r.expected_ots_cost != table.rows[0].expected_ots_cost) {
        v.witness = {{"empirical_cost", r.empirical_cost.str()},
                     {"expected_ots_cost", r.expected_ots_cost.str()},
                     {"first_row_value", table.rows[0].expected_ots_cost.str()}};
        break;
      }
    }
  }
  b.verdicts.push_back(std::move(v));
}

void run_lln(const ExperimentConfig& c, ReportBundle& b) {
  const auto domain = c.domain();
  const auto h = hypothesis_of(c);
  std::vector<std::uint64_t> seeds = c.seeds;
  if (seeds.empty()) seeds.push_back(c.seed);

  std::ostringstream csv;
  csv << "seed,mc_empirical_cost,standard_error,gap,data_blind_cost,n_samples\n";
  for (auto seed : seeds) {
    std::vector<std::size_t> outputs = c.target;
    if (outputs.empty()) {
      Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
      for (std::size_t x = 0; x < c.x_size; ++x) outputs.push_back(rng.below(c.y_size));
    }
    const TargetFunction f(domain, outputs);
    const auto r =
        lln_convergence_experiment(h, f, c.m, c.pi(), c.loss_function(), c.n_samples, seed);
    csv << seed << ',' << fmt(r.mc_empirical_cost) << ',' << fmt(r.standard_error) << ','
        << fmt(r.gap) << ',' << r.data_blind_cost.str() << ',' << r.n_samples << '\n';

    auto params = common_params(c);
    params["seed"] = seed;
    params["n_samples"] = c.n_samples;
    auto v = verdict("lln", params, r.within_three_standard_errors,
                     "|Monte Carlo C_hat - C(f,h*)| = " + brief(r.gap) + " vs 3 SE = " +
                         brief(3 * r.standard_error));
    v.values = {{"mc_empirical_cost", r.mc_empirical_cost},
                {"standard_error", r.standard_error},
                {"gap", r.gap},
                {"data_blind_cost", r.data_blind_cost.str()}};
    b.verdicts.push_back(std::move(v));
  }
  b.files["lln.csv"] = csv.str();
}

void run_olea_gap(const ExperimentConfig& c, ReportBundle& b) {
  const std::size_t n = c.horizon;
  const auto table = gap_exhaustive(n, c.workers);
  std::ostringstream csv;
  csv << "gap,max_final_regret,max_running_regret,count_pairs\n";
  for (const auto& r : table) {
    csv << r.gap << ',' << r.max_final_regret << ',' << r.max_running_regret << ','
        << r.count_pairs << '\n';
  }
  b.files["olea-gap.csv"] = csv.str();

  json params = {{"horizon", n}, {"sequences", 2}};

  // Pairs with the full gap are exactly {all ones, all zeros} in either order.
  bool shape_ok = true;
  for (const auto& [s, t] : pairs_with_gap(n, static_cast<std::int64_t>(n))) {
    const auto ones = [](const PayoffSequence& p) {
      std::size_t k = 0;
      for (auto bit : p.bits()) k += bit;
      return k;
    };
    const bool a = ones(s) == n && ones(t) == 0;
    const bool z = ones(s) == 0 && ones(t) == n;
    shape_ok = shape_ok && (a || z);
  }
  const auto& full = table[n];
  auto v = verdict("olea-gap-full", params, full.max_running_regret <= 1 && shape_ok,
                   "gap n: max running FTL regret " + std::to_string(full.max_running_regret) +
                       " (allowance 1 for the empty-history tie-break)");
  v.values = {{"max_final_regret", full.max_final_regret},
              {"max_running_regret", full.max_running_regret},
              {"pairs", full.count_pairs},
              {"pairs_are_all_ones_vs_all_zeros", shape_ok}};
  b.verdicts.push_back(std::move(v));

  if (n >= 2) {
    const auto& near = table[n - 2];
    auto w = verdict("olea-gap-n-minus-2", params, near.max_running_regret <= 3,
                     "gap n-2: max running FTL regret " + std::to_string(near.max_running_regret) +
                         " (stated bound 2, allowance 3)");
    w.values = {{"max_final_regret", near.max_final_regret},
                {"max_running_regret", near.max_running_regret},
                {"pairs", near.count_pairs},
                {"within_stated_bound_2", near.max_running_regret <= 2}};
    b.verdicts.push_back(std::move(w));
  }
}

void run_olea_embedding(const ExperimentConfig& c, ReportBundle& b) {
  const std::size_t m = c.m;
  const std::size_t K = c.sequences;
  const FiniteDomain window(m + 1, 2);
  const auto pi = SamplingDistribution::uniform(m + 1);
  const auto loss = zero_one_loss(window);
  const std::vector<Strategy> strategies = {Strategy::ftl(), Strategy::ewa(c.eta)};

  // Random instances: the supervised OTS cost of the embedded strategy at the
  // query equals 1 - v_{K+1}(m+1), computed through both routes.
  std::vector<std::size_t> mismatches(strategies.size(), 0);
  std::size_t unsound = 0;
  Rng rng(c.seed);
  for (std::size_t t = 0; t < c.n_samples; ++t) {
    std::vector<PayoffSequence> seqs;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<std::uint8_t> bits(m + 1);
      for (auto& bit : bits) bit = rng.bit() ? 1 : 0;
      seqs.emplace_back(std::move(bits));
    }
    std::vector<std::size_t> labels(m);
    for (auto& y : labels) y = rng.bit() ? 1 : 0;
    const std::size_t f_next = rng.bit() ? 1 : 0;

    const auto e = embed_to_supervised(seqs, labels, m);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t x = 0; x < m; ++x) {
        if ((seqs[k][x] == 1) != (e.training[k][x] == labels[x])) ++unsound;
      }
    }
    std::vector<std::size_t> f_outputs = labels;
    f_outputs.push_back(f_next);
    const TargetFunction f(window, f_outputs);
    std::vector<TargetFunction> considered;
    for (std::size_t k = 0; k < K; ++k) {
      considered.push_back(e.considered_function(k, seqs[k][m] == 1 ? f_next : 1 - f_next));
    }
    const Dataset d = e.dataset();
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const std::size_t choice = strategies[s].next_choice(seqs, m);
      const std::uint8_t v_next = seqs[choice][m];
      const auto h = embedded_strategy_learner(strategies[s], considered).train(window, d);
      const auto outcome = embedding_cost_equivalence(e, f_next, *h.deterministic_output(m));
      const Rational supervised = ots_cost(f, h, d, pi, loss);
      if (!(outcome.cost == supervised && outcome.cost == Rational(1 - v_next) &&
            outcome.payoff == v_next)) {
        ++mismatches[s];
      }
    }
  }

  // Exhaustive: every K-tuple of considered functions over the window, uniform f.
  const std::uint64_t per_function = std::uint64_t{1} << (m + 1);
  std::uint64_t tuples = 1;
  for (std::size_t k = 0; k < K; ++k) tuples *= per_function;
  const auto functions = enumerate_functions(window);
  std::vector<std::size_t> inputs(m);
  for (std::size_t x = 0; x < m; ++x) inputs[x] = x;
  EngineOptions serial;
  std::vector<std::map<Rational, std::uint64_t>> averages(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    const auto per_tuple = parallel_map(tuples, c.workers, [&](std::size_t index) {
      std::vector<TargetFunction> considered;
      std::uint64_t rest = index;
      for (std::size_t k = 0; k < K; ++k) {
        considered.push_back(functions.at(rest % per_function));
        rest /= per_function;
      }
      const auto learner = embedded_strategy_learner(strategies[s], std::move(considered));
      return uniform_f_expected_cost_fixed_inputs(learner, window, inputs, pi, loss, serial);
    });
    for (const auto& value : per_tuple) ++averages[s][value];
  }

  std::ostringstream csv;
  csv << "strategy,instances,mismatches,considered_tuples,distinct_uniform_f_costs,"
         "uniform_f_cost\n";
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    csv << strategies[s].name() << ',' << c.n_samples << ',' << mismatches[s] << ',' << tuples
        << ',' << averages[s].size() << ','
        << (averages[s].size() == 1 ? averages[s].begin()->first.str() : std::string("mixed"))
        << '\n';
  }
  b.files["olea-embedding.csv"] = csv.str();

  json params = {{"m", m}, {"window", m + 1}, {"sequences", K}, {"eta", c.eta.str()},
                 {"seed", c.seed}, {"n_samples", c.n_samples}};
  auto sound = verdict("embedding-soundness", params, unsound == 0,
                       "v_k(x) = 1 iff g_k(x) = d_Y(x) on every training input");
  sound.values = {{"violations", unsound}};
  b.verdicts.push_back(std::move(sound));
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    auto p = params;
    p["strategy"] = strategies[s].name();
    auto v = verdict("embedding-cost-equivalence", p, mismatches[s] == 0,
                     std::to_string(mismatches[s]) + " of " + std::to_string(c.n_samples) +
                         " instances where the next-step OTS cost differs from 1 - v_{K+1}(m+1)");
    v.values = {{"mismatches", mismatches[s]}};
    b.verdicts.push_back(std::move(v));

    const bool half = averages[s].size() == 1 && averages[s].begin()->first == Rational(1, 2);
    auto w = verdict("embedding-uniform-f-average", p, half,
                     "uniform-f expected next-step cost over " + std::to_string(tuples) +
                         " considered-function tuples");
    json seen = json::object();
    for (const auto& [value, count] : averages[s]) seen[value.str()] = count;
    w.values = {{"tuples", tuples}, {"costs", seen}};
    b.verdicts.push_back(std::move(w));
  }
}

}  // namespace

json Verdict::to_json() const {
  const char* result = outcome == Outcome::kPass ? "PASS" : outcome == Outcome::kFail ? "FAIL"
                                                                                     : "INFO";
  return {{"check", check}, {"params", params},   {"result", result},
          {"values", values}, {"witness", witness}, {"detail", detail}};
}

bool ReportBundle::all_pass() const {
  for (const auto& v : verdicts) {
    if (v.outcome == Outcome::kFail) return false;
  }
  return true;
}

ReportBundle run_experiment(const ExperimentConfig& config, bool write) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  ReportBundle bundle;
  const std::string& e = config.experiment;
  try {
    if (e == "nfl-f-average") {
      run_nfl_f_average(config, bundle);
    } else if (e == "nfl-uniform-prior") {
      run_nfl_uniform_prior(config, bundle);
    } else if (e == "prior-average") {
      run_prior_average(config, bundle);
    } else if (e == "counterexample") {
      run_counterexample(config, bundle);
    } else if (e == "prior-witness") {
      run_prior_witness(config, bundle);
    } else if (e == "head-to-head") {
      run_head_to_head(config, bundle);
    } else if (e == "ots-vs-empirical") {
      run_ots_vs_empirical(config, bundle);
    } else if (e == "lln") {
      run_lln(config, bundle);
    } else if (e == "olea-gap") {
      run_olea_gap(config, bundle);
    } else if (e == "olea-embedding") {
      run_olea_embedding(config, bundle);
    }
  } catch (const Error& err) {
    throw Error("experiment '" + e + "': " + err.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string verdicts;
  for (const auto& v : bundle.verdicts) verdicts += v.to_json().dump() + "\n";
  bundle.files["verdicts.jsonl"] = verdicts;

  bundle.metadata = {{"config", config.echo()},
                     {"version", kVersion},
                     {"gmp_version", gmp_version},
                     {"compiler", __VERSION__},
                     {"wall_seconds", seconds},
                     {"files", json::array()}};
  const std::filesystem::path out(config.out_dir);
  for (const auto& [name, content] : bundle.files) {
    bundle.metadata["files"].push_back(name);
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
      bundle.csv_paths.push_back(out / name);
    }
  }

  if (write) {
    std::filesystem::create_directories(out);
    for (const auto& [name, content] : bundle.files) {
      std::ofstream os(out / name, std::ios::binary);
      os << content;
      if (!os) throw Error("cannot write '" + (out / name).string() + "'");
    }
    std::ofstream meta(out / "metadata.json");
    meta << bundle.metadata.dump(2) << '\n';
  }
  return bundle;
}

// -- Verification suite -------------------------------------------------------

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    pass = pass && ok;
  }
};

ReportBundle run_json(json doc, unsigned workers) {
  doc["workers"] = workers;
  return run_experiment(parse_config_json(doc), false);
}

const Verdict* find(const ReportBundle& b, std::string_view check) {
  for (const auto& v : b.verdicts) {
    if (v.check == check) return &v;
  }
  return nullptr;
}

bool passed(const ReportBundle& b, std::string_view check) {
  const auto* v = find(b, check);
  return v && v->outcome == Outcome::kPass;
}

}  // namespace

std::vector<CriterionResult> verify_all(Profile profile, unsigned workers) {
  const bool small = profile == Profile::kSmall;
  const std::size_t x5 = small ? 4 : 5;
  const json five = {"majority", "anti-majority", "constant:0", "constant:1", "random"};

  std::vector<std::pair<std::string, std::function<Check()>>> criteria;

  criteria.emplace_back("nfl-f-average", [&] {
    Check c;
    for (int m : {1, 3}) {
      const auto b = run_json({{"experiment", "nfl-f-average"}, {"x_size", x5}, {"m", m},
                               {"learners", five}},
                              workers);
      c.require(b.all_pass(), "|X|=" + std::to_string(x5) + " m=" + std::to_string(m) +
                                  (b.all_pass() ? " equal" : " differ"));
    }
    return c;
  });

  criteria.emplace_back("nfl-uniform-prior", [&] {
    Check c;
    const std::size_t x = small ? 3 : 4;
    const std::vector<int> sizes = small ? std::vector<int>{1, 2} : std::vector<int>{1, 3};
    for (int m : sizes) {
      const auto b = run_json({{"experiment", "nfl-uniform-prior"}, {"x_size", x}, {"m", m},
                               {"learners", five}},
                              workers);
      const auto* v = find(b, "nfl-uniform-prior");
      c.require(b.all_pass(), "m=" + std::to_string(m) + ": " + v->detail);
    }
    return c;
  });

  criteria.emplace_back("counterexample", [&] {
    Check c;
    const auto b = run_json({{"experiment", "counterexample"}, {"x_size", x5}, {"m", 3}}, workers);
    c.require(passed(b, "counterexample-anti-cv"),
              "anti-cv " + find(b, "counterexample-anti-cv")->values["anti_cv"].get<std::string>());
    c.require(passed(b, "counterexample-random"),
              "random " + find(b, "counterexample-random")->values["random"].get<std::string>());
    return c;
  });

  criteria.emplace_back("phi-sum-constant", [&] {
    Check c;
    const auto b = run_json({{"experiment", "prior-witness"}, {"x_size", x5}, {"m", 3}}, workers);
    const auto* v = find(b, "phi-sum-constant");
    c.require(v->outcome == Outcome::kPass, v->detail);
    return c;
  });

  criteria.emplace_back("prior-witness", [&] {
    Check c;
    const auto b = run_json({{"experiment", "prior-witness"}, {"x_size", x5}, {"m", 3}}, workers);
    const auto* w = find(b, "prior-witness");
    c.require(w->outcome == Outcome::kPass, w->detail);
    const auto* v = find(b, "witness-cv-above-half");
    c.require(v && v->outcome == Outcome::kPass, v ? v->detail : "no witness");
    return c;
  });

  criteria.emplace_back("ots-vs-empirical", [&] {
    Check c;
    std::vector<std::vector<std::size_t>> hs = {std::vector<std::size_t>(x5, 0),
                                                std::vector<std::size_t>(x5, 1)};
    std::vector<std::size_t> mixed(x5);
    for (std::size_t x = 0; x < x5; ++x) mixed[x] = x % 2;
    hs.push_back(mixed);
    for (const auto& h : hs) {
      const auto b = run_json({{"experiment", "ots-vs-empirical"}, {"x_size", x5}, {"m", 3},
                               {"hypothesis", h}},
                              workers);
      const auto* v = find(b, "ots-vs-empirical");
      const auto common = v->values["common_value"].get<std::string>();
      std::string label;
      for (auto y : h) label += std::to_string(y);
      c.require(v->outcome == Outcome::kPass && common == "1/2", "h*=" + label + " rows " + common);
    }
    return c;
  });

  criteria.emplace_back("lln", [&] {
    Check c;
    const json doc = {{"experiment", "lln"},
                      {"x_size", small ? 100 : 1000},
                      {"m", small ? 10 : 100},
                      {"n_samples", small ? 2000 : 10000},
                      {"seeds", {0, 1, 2}}};
    const auto b = run_json(doc, workers);
    for (const auto& v : b.verdicts) {
      c.require(v.outcome == Outcome::kPass,
                "seed " + std::to_string(v.params["seed"].get<std::uint64_t>()) + " " + v.detail);
    }
    return c;
  });

  criteria.emplace_back("olea-gap", [&] {
    Check c;
    const std::size_t n = small ? 8 : 10;
    const json doc = {{"experiment", "olea-gap"}, {"horizon", n}};
    const auto a = run_json(doc, 1);
    const auto again = run_json(doc, 1);
    const auto parallel = run_json(doc, std::max(2u, workers));
    const auto* full = find(a, "olea-gap-full");
    const auto* near = find(a, "olea-gap-n-minus-2");
    c.require(full->outcome == Outcome::kPass, full->detail);
    c.require(near->outcome == Outcome::kPass, near->detail);
    const bool stable = a.files == again.files && a.files == parallel.files;
    c.require(stable, stable ? "identical across reruns and worker counts"
                             : "table changed across reruns or worker counts");
    return c;
  });

  criteria.emplace_back("olea-embedding", [&] {
    Check c;
    const auto b = run_json({{"experiment", "olea-embedding"},
                             {"m", 3},
                             {"n_samples", small ? 200 : 1000},
                             {"seed", 0}},
                            workers);
    for (const auto& v : b.verdicts) {
      c.require(v.outcome == Outcome::kPass,
                v.check + (v.params.contains("strategy")
                               ? "[" + v.params["strategy"].get<std::string>() + "]"
                               : std::string()) +
                    " " + (v.outcome == Outcome::kPass ? "ok" : v.detail));
    }
    return c;
  });

  criteria.emplace_back("head-to-head", [&] {
    Check c;
    const auto binary = run_json(
        {{"experiment", "head-to-head"},
         {"x_size", x5},
         {"m", 3},
         {"learners",
          {"majority", "anti-majority", "constant:0", "constant:1", "random",
           "cv:min:majority,anti-majority", "cv:max:majority,anti-majority"}}},
        workers);
    const auto cyclic = run_json({{"experiment", "head-to-head"},
                                  {"x_size", small ? 3 : 4},
                                  {"y_size", 3},
                                  {"m", 1},
                                  {"loss", "cyclic"},
                                  {"learners", {"constant:0", "constant:1", "constant:2"}}},
                                 workers);
    std::size_t asymmetric = 0;
    for (const auto* b : {&binary, &cyclic}) {
      const auto* s = find(*b, "head-to-head-summary");
      c.require(s->outcome == Outcome::kPass,
                "|Y|=" + std::to_string(s->params["y_size"].get<std::size_t>()) + " marginals " +
                    (s->outcome == Outcome::kPass ? "equal" : "differ") + ", " + s->detail);
      asymmetric += s->values["asymmetric_pairs"].get<std::size_t>();
      if (!s->witness.is_null()) {
        const auto& w = s->witness;
        c.detail += " [witness " + w["learner_a"].get<std::string>() + " vs " +
                    w["learner_b"].get<std::string>() + ": P(" + w["cost_a"].get<std::string>() +
                    "," + w["cost_b"].get<std::string>() + ")=" +
                    w["probability"].get<std::string>() + " swapped " +
                    w["swapped_probability"].get<std::string>() + "]";
      }
    }
    c.require(asymmetric > 0, "asymmetric pairs found: " + std::to_string(asymmetric));
    return c;
  });

  criteria.emplace_back("determinism", [&] {
    Check c;
    const json prior = {{"experiment", "prior-average"}, {"x_size", small ? 3 : 4}, {"m", 1},
                        {"n_samples", 200}, {"seed", 7}};
    const json lln = {{"experiment", "lln"}, {"x_size", 200}, {"m", 20}, {"n_samples", 500},
                      {"seed", 7}};
    for (const auto& doc : {prior, lln}) {
      const auto a = run_json(doc, 1);
      const auto b = run_json(doc, 1);
      const auto p = run_json(doc, std::max(3u, workers));
      c.require(a.files == b.files && a.files == p.files,
                doc["experiment"].get<std::string>() + " bundle " +
                    (a.files == b.files && a.files == p.files ? "byte-identical" : "differs"));
    }
    return c;
  });

  std::vector<CriterionResult> results;
  int id = 0;
  for (auto& [name, fn] : criteria) {
    CriterionResult r;
    r.id = ++id;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto check = fn();
      r.pass = check.pass;
      r.detail = check.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_summary(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  std::size_t passed = 0;
  os << std::left << std::setw(4) << "#" << std::setw(20) << "check" << std::setw(7) << "result"
     << std::setw(10) << "seconds" << "detail\n";
  for (const auto& r : results) {
    passed += r.pass;
    os << std::left << std::setw(4) << r.id << std::setw(20) << r.name << std::setw(7)
       << (r.pass ? "PASS" : "FAIL") << std::setw(10) << std::fixed << std::setprecision(2)
       << r.seconds << r.detail << '\n';
  }
  os << passed << "/" << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace nfl
