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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "nfl/domain.hpp"
#include "nfl/rational.hpp"

namespace nfl {

class Learner;

// L(y_h, y_f): row index is the predicted label, column the true label.
class LossFunction {
 public:
  explicit LossFunction(std::vector<std::vector<Rational>> table);

  std::size_t y_size() const { return table_.size(); }
  const Rational& operator()(std::size_t predicted, std::size_t truth) const {
    return table_.at(predicted).at(truth);
  }
  const std::vector<std::vector<Rational>>& table() const { return table_; }

  friend bool operator==(const LossFunction&, const LossFunction&) = default;

 private:
  std::vector<std::vector<Rational>> table_;
};

LossFunction zero_one_loss(const FiniteDomain& domain);
LossFunction zero_one_loss(std::size_t y_size);

// L(h, y) = (y - h) mod |Y|. Every row is a permutation of {0..|Y|-1}, so the
// loss is homogeneous, but for |Y| >= 3 it is not symmetric in (h, y).
LossFunction cyclic_loss(std::size_t y_size);

// "zero-one" or "cyclic"; throws InvalidArgumentError otherwise.
LossFunction make_loss(std::string_view name, std::size_t y_size);

// Homogeneous: for every cost value c, #{y_f : L(y_h, y_f) = c} does not
// depend on y_h. Equivalently every row holds the same multiset of values.
bool check_homogeneous(const LossFunction& loss);

enum class QueryMode { kDataBlind, kOts };

// P_{d_X}(q). Data-blind mode uses pi directly; OTS mode zeroes every q in
// d_X and renormalizes over the rest.
struct QueryWeighting {
  QueryMode mode;
  SamplingDistribution pi;

  static QueryWeighting data_blind(SamplingDistribution pi) {
    return {QueryMode::kDataBlind, std::move(pi)};
  }
  static QueryWeighting ots(SamplingDistribution pi) { return {QueryMode::kOts, std::move(pi)}; }

  // Normalized weights for d; throws EmptyOtsError when no mass remains.
  std::vector<Rational> weights_for(const Dataset& d) const;
};

// Finite exact distribution over cost values.
class CostDistribution {
 public:
  CostDistribution() = default;
  static CostDistribution delta(const Rational& cost);

  // Accumulates mass at `cost`; zero masses are ignored.
  void add(const Rational& cost, const Rational& probability);
  // Adds every atom of `other` scaled by `weight`.
  void add_scaled(const CostDistribution& other, const Rational& weight);

  const std::map<Rational, Rational>& atoms() const { return atoms_; }
  Rational total_mass() const;
  Rational expectation() const;
  Rational probability_of(const Rational& cost) const;

  friend bool operator==(const CostDistribution&, const CostDistribution&) = default;

 private:
  std::map<Rational, Rational> atoms_;
};

struct AtomDifference {
  Rational cost;
  Rational first_probability;
  Rational second_probability;
};

// Smallest cost atom where the two distributions disagree, if any.
std::optional<AtomDifference> first_difference(const CostDistribution& a,
                                               const CostDistribution& b);

// Normalized sum_q w(q) sum_{y_h} h(y_h|q) L(y_h, f(q)). A stochastic h
// contributes its per-query expected loss.
Rational generic_cost(const TargetFunction& f, const StochasticHypothesis& h, const Dataset& d,
                      const QueryWeighting& w, const LossFunction& loss);

Rational ots_cost(const TargetFunction& f, const StochasticHypothesis& h, const Dataset& d,
                  const SamplingDistribution& pi, const LossFunction& loss);

// Distribution of the cost when each query's prediction is drawn independently
// from h(.|q), i.e. h is read as a distribution over single-valued hypotheses.
// For a deterministic h this is the delta at generic_cost.
CostDistribution cost_distribution_over_realizations(const TargetFunction& f,
                                                     const StochasticHypothesis& h,
                                                     const Dataset& d, const QueryWeighting& w,
                                                     const LossFunction& loss);

// Average loss on the training inputs, pi-weighted, duplicates counted with
// multiplicity.
Rational on_training_cost(const TargetFunction& f, const StochasticHypothesis& h,
                          const Dataset& d, const SamplingDistribution& pi,
                          const LossFunction& loss);

// f-conditioned expected empirical cost: the expectation of on_training_cost
// over every training set of size m.
Rational empirical_cost(const TargetFunction& f, const Learner& learner, std::size_t m,
                        const SamplingDistribution& pi, const LossFunction& loss,
                        Replacement replacement = Replacement::kWith,
                        const EnumerationBudget& budget = {});

}  // namespace nfl
