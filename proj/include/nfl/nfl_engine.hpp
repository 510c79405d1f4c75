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

// Exhaustive, exact evaluation of f-conditioned and d-conditioned cost
// quantities, and the no-free-lunch / free-lunch checks built on them.
//
// Every verdict is a rational equality. Outer loops run over target functions
// and may be split across workers; partial results are exact and are reduced
// in a fixed order, so reports do not depend on the worker count.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nfl/costs.hpp"
#include "nfl/domain.hpp"
#include "nfl/learners.hpp"
#include "nfl/rational.hpp"

namespace nfl {

// How a stochastic hypothesis turns into a cost.
//   kExpected: one number, the per-query expected loss.
//   kRealized: h is a distribution over single-valued hypotheses (independent
//              draw per query); the cost is a random variable with that law.
// Expectations agree; distributions differ only for non-deterministic h.
enum class CostSemantics { kExpected, kRealized };

// What to do with a training set that leaves no OTS mass (replacement
// sampling can cover X).
enum class EmptyOtsPolicy { kAbort, kExcludeAndRenormalize };

struct EngineOptions {
  Replacement replacement = Replacement::kWith;
  EmptyOtsPolicy empty_ots = EmptyOtsPolicy::kAbort;
  EnumerationBudget budget;
  unsigned workers = 1;
};

// P(C | f, m): the law of the cost over all training sets of size m.
CostDistribution cost_distribution_given_f(const Learner& learner, const TargetFunction& f,
                                           std::size_t m, const SamplingDistribution& pi,
                                           const LossFunction& loss, bool ots,
                                           CostSemantics semantics = CostSemantics::kExpected,
                                           const EngineOptions& options = {});

// E(C | d) = sum_f P(f | d) C(f, learner(d), d).
Rational expected_cost_given_d(const Learner& learner, const Prior& prior, const Dataset& d,
                               const SamplingDistribution& pi, const LossFunction& loss,
                               bool ots);

// sum_f P(f) E(C | f, m): expected cost under a prior, averaged over the
// dataset distribution of each f.
Rational prior_expected_cost(const Learner& learner, const Prior& prior, std::size_t m,
                             const SamplingDistribution& pi, const LossFunction& loss, bool ots,
                             const EngineOptions& options = {});

// Uniform prior over the constant functions (two of them for binary Y).
Prior constant_functions_prior(const FiniteDomain& domain);

struct Discrepancy {
  std::size_t first_learner;
  std::size_t second_learner;
  AtomDifference atom;
};

struct NflReport {
  std::string check;
  std::vector<std::string> learner_names;
  std::vector<CostDistribution> distributions;
  bool pass = false;
  std::optional<Discrepancy> discrepancy;
};

// Uniform average over all f of P(C_OTS | f, m), per learner (realized
// semantics). Refuses a non-homogeneous loss unless `force` is set.
NflReport nfl_f_average_check(const std::vector<Learner>& learners, const FiniteDomain& domain,
                              std::size_t m, const SamplingDistribution& pi,
                              const LossFunction& loss, bool force = false,
                              const EngineOptions& options = {});

// P(C_OTS | d) under the uniform prior over all functions, per learner.
NflReport nfl_uniform_prior_check(const std::vector<Learner>& learners,
                                  const FiniteDomain& domain, const Dataset& d,
                                  const SamplingDistribution& pi, const LossFunction& loss,
                                  bool force = false, const EngineOptions& options = {});

struct PriorAverageEntry {
  std::string learner;
  // Expected OTS cost under the barycenter (uniform) prior, which equals the
  // flat-Dirichlet average of the prior-conditioned expected cost.
  Rational exact_expected_cost;
  double mc_mean = 0.0;
  double mc_stddev = 0.0;
  double mc_min = 0.0;
  double mc_max = 0.0;
};

struct PriorAverageReport {
  std::vector<PriorAverageEntry> entries;
  bool exact_equal = false;
  std::size_t n_samples = 0;
};

PriorAverageReport prior_average_check(const std::vector<Learner>& learners,
                                       const FiniteDomain& domain, std::size_t m,
                                       const SamplingDistribution& pi, const LossFunction& loss,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const EngineOptions& options = {});

struct ConditionalRow {
  Rational empirical_cost;     // achievable value c of the training-set cost
  Rational expected_ots_cost;  // E(C_OTS | C_hat = c)
  Rational mass;               // P(C_hat = c)
};

struct ConditionalTable {
  std::vector<ConditionalRow> rows;  // ascending in empirical_cost
  Rational total_mass() const;
  bool rows_equal() const;
};

// Joint law of (training-set cost, OTS cost) for the constant learner h_star
// under uniform f and the dataset distribution, reduced to the conditional
// expectation of the OTS cost per training-set cost value.
ConditionalTable ots_vs_empirical_table(const StochasticHypothesis& h_star,
                                        const FiniteDomain& domain, std::size_t m,
                                        const SamplingDistribution& pi, const LossFunction& loss,
                                        const EngineOptions& options = {});

struct LlnReport {
  double mc_empirical_cost = 0.0;
  double standard_error = 0.0;
  double gap = 0.0;  // |mc_empirical_cost - data_blind_cost|
  Rational data_blind_cost;
  std::size_t n_samples = 0;
  bool within_three_standard_errors = false;
};

// Monte Carlo estimate of the expected training-set cost of the constant
// learner h_star with IID sampling, against the exact data-blind cost.
// Requires |X| >= 10 m.
LlnReport lln_convergence_experiment(const StochasticHypothesis& h_star, const TargetFunction& f,
                                     std::size_t m, const SamplingDistribution& pi,
                                     const LossFunction& loss, std::size_t n_samples,
                                     std::uint64_t seed);

using CostPair = std::pair<Rational, Rational>;

class JointCostDistribution {
 public:
  void add(const Rational& a, const Rational& b, const Rational& probability);
  const std::map<CostPair, Rational>& atoms() const { return atoms_; }
  Rational total_mass() const;
  CostDistribution marginal_first() const;
  CostDistribution marginal_second() const;
  JointCostDistribution transposed() const;

  friend bool operator==(const JointCostDistribution&, const JointCostDistribution&) = default;

 private:
  std::map<CostPair, Rational> atoms_;
};

struct JointAsymmetry {
  Rational cost_a;
  Rational cost_b;
  Rational probability;          // P(C_A = cost_a, C_B = cost_b)
  Rational swapped_probability;  // same atom after interchanging A and B
};

struct HeadToHeadReport {
  std::string learner_a;
  std::string learner_b;
  JointCostDistribution joint;    // (C_A, C_B)
  JointCostDistribution swapped;  // (C_B, C_A)
  bool swap_symmetric = false;
  std::optional<JointAsymmetry> witness;
};

// Exact joint law of the two OTS costs under uniform f (realized semantics,
// the two hypotheses drawn independently given d).
HeadToHeadReport joint_head_to_head(const Learner& a, const Learner& b,
                                    const FiniteDomain& domain, std::size_t m,
                                    const SamplingDistribution& pi, const LossFunction& loss,
                                    const EngineOptions& options = {});

// Cross-validation and anti-cross-validation over {majority, anti-majority}.
Learner phi_learner();
Learner anti_phi_learner();

struct PriorWitness {
  Prior prior;  // delta on `target`
  TargetFunction target;
  Rational anti_cv_expected_cost;
  Rational cv_expected_cost;
};

// Scans vertex priors (all f, lexicographic) and returns the one minimizing the
// anti-cross-validation expected OTS cost, provided it lies below 1/2. Throws
// ConsistencyError when none does.
PriorWitness prior_witness_search(const FiniteDomain& domain, std::size_t m,
                                  const SamplingDistribution& pi, const LossFunction& loss,
                                  const EngineOptions& options = {});

struct PhiSumReport {
  Rational constant;
  std::uint64_t differing_pairs = 0;  // (f, d) where the two selections differ
  std::uint64_t agreeing_pairs = 0;
  // Sum values seen over all pairs, including agreeing ones, with counts.
  std::map<Rational, std::uint64_t> sums_when_agreeing;
};

// E_cv(C_OTS | f, d) + E_anticv(C_OTS | f, d) over every (f, d) whose two
// selections differ, asserted constant. Zero-one loss, binary Y, odd m.
// Throws ConsistencyError listing every distinct value if not constant.
PhiSumReport phi_sum_constant(const FiniteDomain& domain, std::size_t m,
                              const SamplingDistribution& pi, const EngineOptions& options = {});

// Uniform-f average of the OTS cost when the training inputs are the fixed
// ordered sequence `inputs` and d_Y = f on them.
Rational uniform_f_expected_cost_fixed_inputs(const Learner& learner, const FiniteDomain& domain,
                                              const std::vector<std::size_t>& inputs,
                                              const SamplingDistribution& pi,
                                              const LossFunction& loss,
                                              const EngineOptions& options = {});

}  // namespace nfl
