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


#include <map>

#include "doctest.h"
#include "nfl/errors.hpp"
#include "nfl/nfl_engine.hpp"

using namespace nfl;

namespace {

std::vector<Learner> deterministic_learners() {
  return {majority_learner(), anti_majority_learner(), constant_label_learner(0),
          constant_label_learner(1), phi_learner(), anti_phi_learner()};
}

// Independent oracle for the uniform-f average of the OTS zero-one cost law
// of a deterministic learner: loops over f as an integer, input sequences as
// base-|X| integers, and counts OTS disagreements directly.
std::map<Rational, Rational> brute_force_f_average(const Learner& learner, std::size_t x_size,
                                                   std::size_t m) {
  const FiniteDomain domain(x_size, 2);
  std::size_t sequences = 1;
  for (std::size_t i = 0; i < m; ++i) sequences *= x_size;
  const std::size_t functions = std::size_t{1} << x_size;
  const Rational weight = Rational(1) / Rational(static_cast<std::int64_t>(sequences * functions));
  std::map<Rational, Rational> law;
  for (std::size_t fbits = 0; fbits < functions; ++fbits) {
    auto f_at = [&](std::size_t x) { return (fbits >> (x_size - 1 - x)) & 1; };
    for (std::size_t s = 0; s < sequences; ++s) {
      std::vector<LabeledPoint> pairs;
      std::vector<bool> seen(x_size, false);
      std::size_t rest = s;
      std::vector<std::size_t> xs(m);
      for (std::size_t i = m; i-- > 0;) {
        xs[i] = rest % x_size;
        rest /= x_size;
      }
      for (auto x : xs) {
        pairs.push_back({x, f_at(x)});
        seen[x] = true;
      }
      const auto h = learner.train(domain, Dataset(pairs));
      std::int64_t wrong = 0;
      std::int64_t off = 0;
      for (std::size_t x = 0; x < x_size; ++x) {
        if (seen[x]) continue;
        ++off;
        wrong += *h.deterministic_output(x) != f_at(x);
      }
      REQUIRE(off > 0);
      law[Rational(wrong, off)] += weight;
    }
  }
  return law;
}

// Picks one representative f per labeled training set.
bool zero_off_training_set(const TargetFunction& f, const Dataset& d) {
  for (std::size_t x = 0; x < f.domain().x_size(); ++x) {
    if (!d.contains_input(x) && f(x) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("f-conditioned cost distributions") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = zero_one_loss(domain);
  const auto ones = TargetFunction::constant(domain, 1);
  CHECK(cost_distribution_given_f(majority_learner(), ones, 2, pi, loss, true) ==
        CostDistribution::delta(Rational(0)));
  CHECK(cost_distribution_given_f(anti_majority_learner(), ones, 2, pi, loss, true) ==
        CostDistribution::delta(Rational(1)));
  const TargetFunction f(domain, {0, 1, 1, 0});
  CHECK(cost_distribution_given_f(random_guess_learner(), f, 2, pi, loss, true) ==
        CostDistribution::delta(Rational(1, 2)));
  const auto realized = cost_distribution_given_f(random_guess_learner(), f, 2, pi, loss, true,
                                                  CostSemantics::kRealized);
  CHECK(realized.total_mass() == Rational(1));
  CHECK(realized.expectation() == Rational(1, 2));
  CHECK(realized.atoms().size() > 1);

  // Replacement sampling with m >= |X| can cover X.
  CHECK_THROWS_AS(cost_distribution_given_f(majority_learner(), f, 4, pi, loss, true),
                  EmptyOtsError);
  EngineOptions exclude;
  exclude.empty_ots = EmptyOtsPolicy::kExcludeAndRenormalize;
  CHECK(cost_distribution_given_f(majority_learner(), f, 4, pi, loss, true,
                                  CostSemantics::kExpected, exclude)
            .total_mass() == Rational(1));
}

TEST_CASE("posterior expected cost") {
  const FiniteDomain domain(5, 2);
  const auto pi = SamplingDistribution::uniform(5);
  const auto loss = zero_one_loss(domain);
  const auto prior = constant_functions_prior(domain);
  const Dataset all_ones({{0, 1}, {1, 1}, {2, 1}});
  CHECK(expected_cost_given_d(anti_phi_learner(), prior, all_ones, pi, loss, true) == Rational(1));
  CHECK(expected_cost_given_d(random_guess_learner(), prior, all_ones, pi, loss, true) ==
        Rational(1, 2));
  CHECK(expected_cost_given_d(random_guess_learner(), Prior::uniform(domain), all_ones, pi, loss,
                              true) == Rational(1, 2));
  const TargetFunction f(domain, {1, 1, 1, 0, 1});
  const auto d = Dataset({{0, 1}, {3, 0}});
  CHECK(expected_cost_given_d(majority_learner(), Prior::delta(f), d, pi, loss, true) ==
        ots_cost(f, majority_learner().train(domain, d), d, pi, loss));
  CHECK_THROWS_AS(expected_cost_given_d(majority_learner(), Prior::delta(f), Dataset({{0, 0}}), pi,
                                        loss, true),
                  NoConsistentFunctionError);
}

TEST_CASE("uniform-f average matches the brute-force oracle") {
  const auto loss = zero_one_loss(2);
  for (std::size_t m : {1u, 2u}) {
    for (const auto& learner : {majority_learner(), anti_majority_learner(),
                                constant_label_learner(1), anti_phi_learner()}) {
      if (m < 2 && learner.name().rfind("cv:", 0) == 0) continue;
      const auto report = nfl_f_average_check({learner}, FiniteDomain(4, 2), m,
                                              SamplingDistribution::uniform(4), loss);
      CHECK(report.pass);
      CHECK(report.distributions[0].atoms() == brute_force_f_average(learner, 4, m));
    }
  }
}

TEST_CASE("f-average check examples") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = zero_one_loss(domain);
  const auto report = nfl_f_average_check(
      {majority_learner(), anti_majority_learner(), constant_label_learner(0)}, domain, 1, pi, loss);
  CHECK(report.pass);
  CHECK_FALSE(report.discrepancy.has_value());
  CHECK(report.distributions[0] == report.distributions[1]);
  CHECK(report.distributions[0] == report.distributions[2]);
  CHECK(report.learner_names[1] == "anti-majority");
  CHECK(nfl_f_average_check({majority_learner()}, domain, 1, pi, loss).pass);

  const LossFunction skewed({{Rational(0), Rational(1)}, {Rational(0), Rational(0)}});
  CHECK_THROWS_AS(nfl_f_average_check({majority_learner()}, domain, 1, pi, skewed),
                  InvalidArgumentError);
}

TEST_CASE("a forced non-homogeneous loss breaks the f-average identity") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  int failures = 0;
  for (int bits = 0; bits < 16; ++bits) {
    const LossFunction loss({{Rational(bits & 1), Rational((bits >> 1) & 1)},
                             {Rational((bits >> 2) & 1), Rational((bits >> 3) & 1)}});
    if (check_homogeneous(loss)) {
      CHECK(nfl_f_average_check({constant_label_learner(0), constant_label_learner(1)}, domain, 1,
                                pi, loss)
                .pass);
      continue;
    }
    const auto report = nfl_f_average_check(
        {constant_label_learner(0), constant_label_learner(1)}, domain, 1, pi, loss, true);
    if (!report.pass) {
      ++failures;
      REQUIRE(report.discrepancy.has_value());
      CHECK(report.discrepancy->atom.first_probability !=
            report.discrepancy->atom.second_probability);
    }
  }
  // Unequal rows of a 0/1 table have unequal sums, so all ten fail.
  CHECK(failures == 10);
}

TEST_CASE("f-average identity across learners, sizes and worker counts") {
  const auto loss = zero_one_loss(2);
  for (std::size_t x = 3; x <= 5; ++x) {
    const FiniteDomain domain(x, 2);
    const auto pi = SamplingDistribution::uniform(x);
    EngineOptions options;
    options.empty_ots = EmptyOtsPolicy::kExcludeAndRenormalize;
    auto learners = deterministic_learners();
    learners.push_back(random_guess_learner());
    const auto m3 = nfl_f_average_check(learners, domain, 3, pi, loss, false, options);
    CHECK(m3.pass);
    learners.erase(learners.begin() + 4, learners.begin() + 6);
    CHECK(nfl_f_average_check(learners, domain, 1, pi, loss, false, options).pass);

    const auto serial =
        nfl_f_average_check(deterministic_learners(), domain, 3, pi, loss, false, options);
    options.workers = 3;
    CHECK(nfl_f_average_check(deterministic_learners(), domain, 3, pi, loss, false, options)
              .distributions == serial.distributions);
  }
}

TEST_CASE("uniform-prior check") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = zero_one_loss(domain);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      const auto r = nfl_uniform_prior_check({majority_learner(), anti_majority_learner()}, domain,
                                             Dataset({{x, y}}), pi, loss);
      CHECK(r.pass);
      CHECK(r.distributions[0].total_mass() == Rational(1));
    }
  }
  CHECK(nfl_uniform_prior_check({majority_learner()}, domain, Dataset({{0, 1}}), pi, loss).pass);
  CHECK_THROWS_AS(nfl_uniform_prior_check({majority_learner()}, domain,
                                          Dataset({{0, 1}, {1, 1}, {2, 0}, {3, 0}}), pi, loss),
                  EmptyOtsError);
}

TEST_CASE("uniform-prior identity for every dataset of size 1 and 3") {
  const auto loss = zero_one_loss(2);
  for (std::size_t x : {3u, 5u}) {
    const FiniteDomain domain(x, 2);
    const auto pi = SamplingDistribution::uniform(x);
    auto learners = deterministic_learners();
    learners.push_back(random_guess_learner());
    std::size_t checked = 0;
    for (const auto& f : enumerate_functions(domain)) {
      for (std::size_t m : {1u, 3u}) {
        for (const auto& d : enumerate_training_sets(f, m, pi, Replacement::kWithout)) {
          if (d.covers(domain) || !zero_off_training_set(f, d)) continue;
          auto usable = learners;
          if (m < 2) usable.erase(usable.begin() + 4, usable.begin() + 6);
          CHECK(nfl_uniform_prior_check(usable, domain, d, pi, loss).pass);
          ++checked;
        }
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("prior average") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = zero_one_loss(domain);
  const auto exact = prior_average_check({majority_learner(), anti_majority_learner()}, domain, 1,
                                         pi, loss, 0, 0);
  CHECK(exact.exact_equal);
  CHECK(exact.n_samples == 0);
  for (const auto& e : exact.entries) CHECK(e.exact_expected_cost == Rational(1, 2));

  const auto mc = prior_average_check({majority_learner(), anti_majority_learner()}, domain, 1, pi,
                                      loss, 1000, 3);
  CHECK(mc.n_samples == 1000);
  for (const auto& e : mc.entries) {
    CHECK(std::abs(e.mc_mean - 0.5) < 0.02);
    CHECK(e.mc_min <= e.mc_mean);
    CHECK(e.mc_mean <= e.mc_max);
    CHECK(e.mc_stddev > 0.0);
  }
  EngineOptions parallel;
  parallel.workers = 4;
  const auto again = prior_average_check({majority_learner(), anti_majority_learner()}, domain, 1,
                                         pi, loss, 1000, 3, parallel);
  CHECK(again.entries[0].mc_mean == mc.entries[0].mc_mean);
  CHECK(again.entries[1].mc_stddev == mc.entries[1].mc_stddev);
}

TEST_CASE("OTS cost is decoupled from the training-set cost") {
  const auto loss = zero_one_loss(2);
  const FiniteDomain domain(4, 2);
  for (const auto& outputs : {std::vector<std::size_t>{0, 0, 0, 0},
                              std::vector<std::size_t>{1, 0, 1, 1}}) {
    const auto table =
        ots_vs_empirical_table(StochasticHypothesis::deterministic(domain, outputs), domain, 2,
                               SamplingDistribution::uniform(4), loss);
    CHECK(table.rows_equal());
    CHECK(table.total_mass() == Rational(1));
    for (const auto& r : table.rows) CHECK(r.expected_ots_cost == Rational(1, 2));
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      CHECK(table.rows[i - 1].empirical_cost < table.rows[i].empirical_cost);
    }
  }
}

TEST_CASE("law of large numbers experiment") {
  const FiniteDomain domain(100, 2);
  const auto pi = SamplingDistribution::uniform(100);
  const auto loss = zero_one_loss(domain);
  std::vector<std::size_t> outputs(100);
  for (std::size_t x = 0; x < 100; ++x) outputs[x] = (x % 3 == 0);
  const TargetFunction f(domain, outputs);

  const auto exact = lln_convergence_experiment(StochasticHypothesis::deterministic(f), f, 10, pi,
                                                loss, 100, 1);
  CHECK(exact.mc_empirical_cost == 0.0);
  CHECK(exact.data_blind_cost == Rational(0));
  CHECK(exact.within_three_standard_errors);

  const auto zeros = StochasticHypothesis::deterministic(domain, std::vector<std::size_t>(100, 0));
  const auto r = lln_convergence_experiment(zeros, f, 10, pi, loss, 4000, 9);
  CHECK(r.data_blind_cost == Rational(34, 100));
  CHECK(r.within_three_standard_errors);
  CHECK(r.gap == doctest::Approx(std::abs(r.mc_empirical_cost - 0.34)));
  CHECK(lln_convergence_experiment(zeros, f, 10, pi, loss, 500, 9).mc_empirical_cost ==
        lln_convergence_experiment(zeros, f, 10, pi, loss, 500, 9).mc_empirical_cost);
  CHECK_THROWS_AS(lln_convergence_experiment(zeros, f, 11, pi, loss, 100, 1),
                  InvalidArgumentError);
}

TEST_CASE("head-to-head joint distributions") {
  const FiniteDomain domain(4, 2);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = zero_one_loss(domain);
  const auto complement =
      joint_head_to_head(majority_learner(), anti_majority_learner(), domain, 2, pi, loss);
  CHECK(complement.joint.total_mass() == Rational(1));
  for (const auto& [costs, p] : complement.joint.atoms()) {
    CHECK(costs.first + costs.second == Rational(1));
  }
  const auto self = joint_head_to_head(phi_learner(), phi_learner(), domain, 3, pi, loss);
  CHECK(self.swap_symmetric);
  for (const auto& [costs, p] : self.joint.atoms()) CHECK(costs.first == costs.second);

  // Binary labels with a homogeneous loss: every pair is swap-symmetric and
  // both marginals are the common f-averaged law.
  const auto learners = deterministic_learners();
  const auto common = nfl_f_average_check(learners, domain, 3, pi, loss);
  for (std::size_t i = 0; i < learners.size(); ++i) {
    for (std::size_t j = i + 1; j < learners.size(); ++j) {
      const auto r = joint_head_to_head(learners[i], learners[j], domain, 3, pi, loss);
      CHECK(r.swap_symmetric);
      CHECK_FALSE(r.witness.has_value());
      CHECK(r.joint.marginal_first() == common.distributions[0]);
      CHECK(r.joint.marginal_second() == common.distributions[0]);
      CHECK(r.swapped == r.joint.transposed());
    }
  }
}

TEST_CASE("cyclic loss on three labels separates head-to-head orderings") {
  const FiniteDomain domain(4, 3);
  const auto pi = SamplingDistribution::uniform(4);
  const auto loss = cyclic_loss(3);
  const auto r =
      joint_head_to_head(constant_label_learner(0), constant_label_learner(1), domain, 1, pi, loss);
  CHECK(r.joint.atoms().count({Rational(0), Rational(1)}) == 0);
  CHECK(r.joint.atoms().at({Rational(1), Rational(0)}) == Rational(1, 27));
  CHECK_FALSE(r.swap_symmetric);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->probability != r.witness->swapped_probability);
  CHECK(r.joint.marginal_first() == r.joint.marginal_second());
}

TEST_CASE("prior witness search") {
  const FiniteDomain domain(5, 2);
  const auto pi = SamplingDistribution::uniform(5);
  const auto loss = zero_one_loss(domain);
  EngineOptions distinct;
  distinct.replacement = Replacement::kWithout;
  const auto w = prior_witness_search(domain, 3, pi, loss, distinct);
  CHECK(w.anti_cv_expected_cost < Rational(1, 2));
  CHECK(w.cv_expected_cost > Rational(1, 2));
  CHECK(w.prior == Prior::delta(w.target));
  const auto constant = phi_sum_constant(domain, 3, pi, distinct).constant;
  CHECK(w.cv_expected_cost + w.anti_cv_expected_cost == constant);
  CHECK_FALSE(w.target == TargetFunction::constant(domain, 0));
  CHECK_FALSE(w.target == TargetFunction::constant(domain, 1));
  for (std::size_t label : {0u, 1u}) {
    CHECK(cost_distribution_given_f(anti_phi_learner(), TargetFunction::constant(domain, label), 3,
                                    pi, loss, true, CostSemantics::kExpected, distinct)
              .expectation() == Rational(1));
  }
  const auto with = prior_witness_search(domain, 3, pi, loss);
  CHECK(with.anti_cv_expected_cost < Rational(1, 2));
  CHECK_THROWS_AS(prior_witness_search(domain, 2, pi, loss), InvalidArgumentError);
  CHECK_THROWS_AS(prior_witness_search(FiniteDomain(4, 3), 3, SamplingDistribution::uniform(4),
                                       zero_one_loss(3)),
                  InvalidArgumentError);
}

TEST_CASE("sum of cross-validation and anti-cross-validation costs") {
  const FiniteDomain domain(5, 2);
  const auto pi = SamplingDistribution::uniform(5);
  EngineOptions distinct;
  distinct.replacement = Replacement::kWithout;
  const auto r = phi_sum_constant(domain, 3, pi, distinct);
  CHECK(r.constant == Rational(1));
  CHECK(r.agreeing_pairs == 0);
  CHECK(r.differing_pairs == 32 * 60);

  const auto with = phi_sum_constant(domain, 3, pi);
  CHECK(with.constant == Rational(1));
  distinct.workers = 3;
  CHECK(phi_sum_constant(domain, 3, pi, distinct).differing_pairs == r.differing_pairs);
  CHECK_THROWS_AS(phi_sum_constant(domain, 2, pi), InvalidArgumentError);

  // Constant targets: both selections are deterministic and the sum is 1.
  const auto loss = zero_one_loss(domain);
  for (std::size_t label : {0u, 1u}) {
    const auto f = TargetFunction::constant(domain, label);
    for (const auto& d : enumerate_training_sets(f, 3, pi, Replacement::kWithout)) {
      CHECK(ots_cost(f, phi_learner().train(domain, d), d, pi, loss) +
                ots_cost(f, anti_phi_learner().train(domain, d), d, pi, loss) ==
            Rational(1));
    }
  }
}

TEST_CASE("constant-function prior expected costs") {
  const FiniteDomain domain(5, 2);
  const auto pi = SamplingDistribution::uniform(5);
  const auto loss = zero_one_loss(domain);
  const auto prior = constant_functions_prior(domain);
  EngineOptions distinct;
  distinct.replacement = Replacement::kWithout;
  CHECK(prior_expected_cost(anti_phi_learner(), prior, 3, pi, loss, true, distinct) ==
        Rational(1));
  CHECK(prior_expected_cost(phi_learner(), prior, 3, pi, loss, true, distinct) == Rational(0));
  CHECK(prior_expected_cost(random_guess_learner(), prior, 3, pi, loss, true, distinct) ==
        Rational(1, 2));
  // With replacement the five all-repeat input sequences out of 125 tie.
  CHECK(prior_expected_cost(anti_phi_learner(), prior, 3, pi, loss, true) == Rational(24, 25));
}
