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


#include "doctest.h"
#include "nfl/costs.hpp"
#include "nfl/errors.hpp"
#include "nfl/learners.hpp"

using namespace nfl;

namespace {

const FiniteDomain kDomain(5, 2);

Dataset labeled(std::initializer_list<std::size_t> labels) {
  std::vector<LabeledPoint> pairs;
  std::size_t x = 0;
  for (auto y : labels) pairs.push_back({x++, y});
  return Dataset(std::move(pairs));
}

std::size_t off_training_prediction(const Learner& l, const Dataset& d) {
  const auto h = l.train(kDomain, d);
  for (std::size_t x = 0; x < kDomain.x_size(); ++x) {
    if (!d.contains_input(x)) return *h.deterministic_output(x);
  }
  FAIL("no off-training input");
  return 0;
}

}  // namespace

TEST_CASE("majority learner") {
  const auto l = majority_learner();
  CHECK(off_training_prediction(l, labeled({1, 1, 0})) == 1);
  CHECK(off_training_prediction(l, labeled({0, 0, 0})) == 0);
  CHECK(off_training_prediction(l, labeled({0, 1})) == 1);
  const auto h = l.train(kDomain, labeled({1, 0, 0}));
  CHECK(h.deterministic_output(0) == std::optional<std::size_t>(1));
  CHECK(h.deterministic_output(4) == std::optional<std::size_t>(0));
  // Latest pair wins on a repeated input.
  const auto g = l.train(kDomain, Dataset({{2, 1}, {2, 0}, {3, 0}}));
  CHECK(g.deterministic_output(2) == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(l.train(FiniteDomain(3, 3), Dataset({{0, 1}})), InvalidArgumentError);
}

TEST_CASE("anti-majority learner") {
  const auto l = anti_majority_learner();
  CHECK(off_training_prediction(l, labeled({1, 1, 0})) == 0);
  CHECK(off_training_prediction(l, labeled({0, 0, 0})) == 1);
  CHECK(l.train(kDomain, labeled({1, 0})).deterministic_output(1) ==
        std::optional<std::size_t>(0));

  // Pointwise OTS complement of majority on every dataset of size 1..3.
  const auto pi = SamplingDistribution::uniform(5);
  for (const auto& f : enumerate_functions(FiniteDomain(5, 2))) {
    for (std::size_t m = 1; m <= 3; ++m) {
      for (const auto& d : enumerate_training_sets(f, m, pi)) {
        const auto a = majority_learner().train(kDomain, d);
        const auto b = l.train(kDomain, d);
        for (std::size_t x = 0; x < 5; ++x) {
          if (d.contains_input(x)) {
            CHECK(a.deterministic_output(x) == b.deterministic_output(x));
          } else {
            CHECK(*a.deterministic_output(x) + *b.deterministic_output(x) == 1);
          }
        }
      }
    }
  }
}

TEST_CASE("constant and random learners ignore the data") {
  const auto h = StochasticHypothesis::deterministic(kDomain, {0, 1, 1, 0, 1});
  const auto c = constant_learner(h);
  CHECK(c.train(kDomain, labeled({1})) == h);
  CHECK(c.train(kDomain, labeled({0, 0, 0})) == h);
  CHECK(constant_label_learner(1).train(kDomain, labeled({0})) ==
        StochasticHypothesis::deterministic(TargetFunction::constant(kDomain, 1)));
  CHECK(constant_label_learner(1).name() == "constant:1");

  const auto r = random_guess_learner();
  const auto a = r.train(kDomain, labeled({1, 0}));
  CHECK(a == r.train(kDomain, labeled({0, 0, 0})));
  for (std::size_t x = 0; x < 5; ++x) {
    CHECK(a.prob(x, 0) == Rational(1, 2));
    CHECK(a.prob(x, 1) == Rational(1, 2));
  }
  const auto pi = SamplingDistribution::uniform(5);
  for (const auto& f : enumerate_functions(kDomain)) {
    CHECK(ots_cost(f, a, labeled({f(0), f(1)}), pi, zero_one_loss(kDomain)) == Rational(1, 2));
  }
}

TEST_CASE("leave-one-out error") {
  const auto loss = zero_one_loss(kDomain);
  CHECK(loo_cv_error(majority_learner(), kDomain, labeled({1, 1, 1}), loss) == Rational(0));
  CHECK(loo_cv_error(anti_majority_learner(), kDomain, labeled({1, 1, 1}), loss) == Rational(1));
  CHECK(loo_cv_error(majority_learner(), kDomain, labeled({1, 1, 0}), loss) == Rational(1, 3));
  CHECK(loo_cv_error(anti_majority_learner(), kDomain, labeled({1, 1, 0}), loss) ==
        Rational(2, 3));
  CHECK_THROWS_AS(loo_cv_error(majority_learner(), kDomain, labeled({1}), loss),
                  InvalidArgumentError);
  // A held-out input that repeats elsewhere is memorized: no error either way.
  const Dataset dup({{2, 1}, {2, 1}, {2, 1}});
  CHECK(loo_cv_error(anti_majority_learner(), kDomain, dup, loss) == Rational(0));
}

TEST_CASE("cross-validation selection") {
  const std::vector<Learner> algos = {majority_learner(), anti_majority_learner()};
  const auto loss = zero_one_loss(kDomain);
  const auto d = labeled({1, 1, 1});
  CHECK(cv_select(algos, CvSelectionMode::kMin, kDomain, d, loss) == 0);
  CHECK(cv_select(algos, CvSelectionMode::kMax, kDomain, d, loss) == 1);
  // Equal errors go to index 0 in both modes.
  const std::vector<Learner> same = {constant_label_learner(1), constant_label_learner(1)};
  CHECK(cv_select(same, CvSelectionMode::kMin, kDomain, d, loss) == 0);
  CHECK(cv_select(same, CvSelectionMode::kMax, kDomain, d, loss) == 0);

  const auto phi = cv_meta(algos, CvSelectionMode::kMin);
  const auto anti = cv_meta(algos, CvSelectionMode::kMax);
  CHECK(phi.name() == "cv:min:majority,anti-majority");
  CHECK(off_training_prediction(phi, d) == 1);
  CHECK(off_training_prediction(anti, d) == 0);
  CHECK_THROWS_AS(cv_meta({}, CvSelectionMode::kMin), InvalidArgumentError);
}

TEST_CASE("selections differ for odd m with distinct inputs") {
  const std::vector<Learner> algos = {majority_learner(), anti_majority_learner()};
  const auto loss = zero_one_loss(kDomain);
  const auto pi = SamplingDistribution::uniform(5);
  for (const auto& f : enumerate_functions(kDomain)) {
    for (const auto& d : enumerate_training_sets(f, 3, pi, Replacement::kWithout)) {
      const auto e0 = loo_cv_error(algos[0], kDomain, d, loss);
      const auto e1 = loo_cv_error(algos[1], kDomain, d, loss);
      CHECK(e0 + e1 == Rational(1));
      CHECK(e0 != e1);
      CHECK(cv_select(algos, CvSelectionMode::kMin, kDomain, d, loss) !=
            cv_select(algos, CvSelectionMode::kMax, kDomain, d, loss));
    }
  }
}

TEST_CASE("anti-cross-validation costs 1 on constant targets") {
  const auto anti = cv_meta({majority_learner(), anti_majority_learner()}, CvSelectionMode::kMax);
  const auto pi = SamplingDistribution::uniform(5);
  const auto loss = zero_one_loss(kDomain);
  for (std::size_t label : {0u, 1u}) {
    const auto f = TargetFunction::constant(kDomain, label);
    for (const auto& d : enumerate_training_sets(f, 3, pi, Replacement::kWithout)) {
      CHECK(ots_cost(f, anti.train(kDomain, d), d, pi, loss) == Rational(1));
    }
    // With replacement the all-repeat datasets tie at LOO error 0 and fall
    // back to majority, which is right everywhere.
    for (const auto& d : enumerate_training_sets(f, 3, pi, Replacement::kWith)) {
      const Rational c = ots_cost(f, anti.train(kDomain, d), d, pi, loss);
      CHECK(c == (d.distinct_input_count() == 1 ? Rational(0) : Rational(1)));
    }
  }
}

TEST_CASE("learners are deterministic") {
  const auto pi = SamplingDistribution::uniform(5);
  const std::vector<std::string> names = {"majority", "anti-majority", "random", "constant:0",
                                          "cv:min:majority,anti-majority",
                                          "cv:max:majority,anti-majority"};
  const auto f = TargetFunction(kDomain, {0, 1, 1, 0, 1});
  for (const auto& name : names) {
    const auto a = make_learner(name);
    const auto b = make_learner(name);
    CHECK(a.name() == name);
    for (const auto& d : enumerate_training_sets(f, 3, pi)) {
      CHECK(a.train(kDomain, d) == a.train(kDomain, d));
      CHECK(a.train(kDomain, d) == b.train(kDomain, d));
    }
  }
}

TEST_CASE("learner registry") {
  CHECK(make_learner("constant:3").name() == "constant:3");
  CHECK(make_learner("cv:max:majority,constant:1").name() == "cv:max:majority,constant:1");
  CHECK_THROWS_WITH_AS(make_learner("majorty"), doctest::Contains("majorty"),
                       InvalidArgumentError);
  CHECK_THROWS_AS(make_learner("constant:x"), InvalidArgumentError);
  CHECK_THROWS_AS(make_learner("cv:median:majority"), InvalidArgumentError);
  CHECK_THROWS_AS(make_learner("cv:min:"), InvalidArgumentError);
  for (const auto& name : learner_registry_examples()) CHECK_NOTHROW(make_learner(name));
}
