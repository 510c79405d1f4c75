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

#include "nfl/costs.hpp"

#include <algorithm>
#include <string>

#include "nfl/errors.hpp"
#include "nfl/learners.hpp"

namespace nfl {

namespace {

void require_compatible(const TargetFunction& f, const StochasticHypothesis& h,
                        const LossFunction& loss) {
  if (!(f.domain() == h.domain())) {
    throw InvalidArgumentError("cost: target and hypothesis live on different domains");
  }
  if (loss.y_size() != f.domain().y_size()) {
    throw InvalidArgumentError("cost: loss table does not match |Y|");
  }
}

Rational expected_loss_at(const TargetFunction& f, const StochasticHypothesis& h, std::size_t q,
                          const LossFunction& loss) {
  Rational total;
  const auto dist = h.distribution(q);
  for (std::size_t y = 0; y < dist.size(); ++y) {
    if (!dist[y].is_zero()) total += dist[y] * loss(y, f(q));
  }
  return total;
}

}  // namespace

// -- LossFunction -------------------------------------------------------------

LossFunction::LossFunction(std::vector<std::vector<Rational>> table) : table_(std::move(table)) {
  if (table_.empty()) throw InvalidArgumentError("LossFunction: empty table");
  for (const auto& row : table_) {
    if (row.size() != table_.size()) throw InvalidArgumentError("LossFunction: table not square");
    for (const auto& v : row) {
      if (v.sign() < 0) throw InvalidArgumentError("LossFunction: negative entry");
    }
  }
}

LossFunction zero_one_loss(std::size_t y_size) {
  std::vector<std::vector<Rational>> table(y_size, std::vector<Rational>(y_size, Rational(1)));
  for (std::size_t y = 0; y < y_size; ++y) table[y][y] = Rational(0);
  return LossFunction(std::move(table));
}

LossFunction zero_one_loss(const FiniteDomain& domain) { return zero_one_loss(domain.y_size()); }

LossFunction cyclic_loss(std::size_t y_size) {
  std::vector<std::vector<Rational>> table(y_size, std::vector<Rational>(y_size));
  for (std::size_t h = 0; h < y_size; ++h) {
    for (std::size_t y = 0; y < y_size; ++y) {
      table[h][y] = Rational(static_cast<std::int64_t>((y + y_size - h) % y_size));
    }
  }
  return LossFunction(std::move(table));
}

LossFunction make_loss(std::string_view name, std::size_t y_size) {
  if (name == "zero-one") return zero_one_loss(y_size);
  if (name == "cyclic") return cyclic_loss(y_size);
  throw InvalidArgumentError("unknown loss '" + std::string(name) + "' (expected zero-one or cyclic)");
}

bool check_homogeneous(const LossFunction& loss) {
  auto sorted_row = [&](std::size_t r) {
    auto row = loss.table()[r];
    std::sort(row.begin(), row.end());
    return row;
  };
  const auto reference = sorted_row(0);
  for (std::size_t r = 1; r < loss.y_size(); ++r) {
    if (sorted_row(r) != reference) return false;
  }
  return true;
}

// -- QueryWeighting -----------------------------------------------------------

std::vector<Rational> QueryWeighting::weights_for(const Dataset& d) const {
  std::vector<Rational> w = pi.weights();
  if (mode == QueryMode::kDataBlind) return w;
  Rational mass;
  for (std::size_t q = 0; q < w.size(); ++q) {
    if (d.contains_input(q)) {
      w[q] = Rational(0);
    } else {
      mass += w[q];
    }
  }
  if (mass.is_zero()) {
    throw EmptyOtsError("off-training-set region has zero sampling mass");
  }
  for (auto& v : w) v /= mass;
  return w;
}

// -- CostDistribution ---------------------------------------------------------

CostDistribution CostDistribution::delta(const Rational& cost) {
  CostDistribution out;
  out.add(cost, Rational(1));
  return out;
}

void CostDistribution::add(const Rational& cost, const Rational& probability) {
  if (probability.is_zero()) return;
  if (probability.sign() < 0) throw InvalidArgumentError("CostDistribution: negative mass");
  atoms_[cost] += probability;
}

void CostDistribution::add_scaled(const CostDistribution& other, const Rational& weight) {
  for (const auto& [cost, p] : other.atoms_) add(cost, p * weight);
}

Rational CostDistribution::total_mass() const {
  Rational total;
  for (const auto& [cost, p] : atoms_) total += p;
  return total;
}

Rational CostDistribution::expectation() const {
  Rational total;
  for (const auto& [cost, p] : atoms_) total += cost * p;
  return total;
}

Rational CostDistribution::probability_of(const Rational& cost) const {
  auto it = atoms_.find(cost);
  return it == atoms_.end() ? Rational(0) : it->second;
}

std::optional<AtomDifference> first_difference(const CostDistribution& a,
                                               const CostDistribution& b) {
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->first < ib->first)) {
      return AtomDifference{ia->first, ia->second, Rational(0)};
    }
    if (ia == a.atoms().end() || ib->first < ia->first) {
      return AtomDifference{ib->first, Rational(0), ib->second};
    }
    if (ia->second != ib->second) return AtomDifference{ia->first, ia->second, ib->second};
    ++ia;
    ++ib;
  }
  return std::nullopt;
}

// -- Costs --------------------------------------------------------------------

Rational generic_cost(const TargetFunction& f, const StochasticHypothesis& h, const Dataset& d,
                      const QueryWeighting& w, const LossFunction& loss) {
  require_compatible(f, h, loss);
  if (w.pi.size() != f.domain().x_size()) {
    throw InvalidArgumentError("cost: sampling distribution does not match |X|");
  }
  const auto weights = w.weights_for(d);
  Rational total;
  for (std::size_t q = 0; q < weights.size(); ++q) {
    if (!weights[q].is_zero()) total += weights[q] * expected_loss_at(f, h, q, loss);
  }
  return total;
}

Rational ots_cost(const TargetFunction& f, const StochasticHypothesis& h, const Dataset& d,
                  const SamplingDistribution& pi, const LossFunction& loss) {
  return generic_cost(f, h, d, QueryWeighting::ots(pi), loss);
}

CostDistribution cost_distribution_over_realizations(const TargetFunction& f,
                                                     const StochasticHypothesis& h,
                                                     const Dataset& d, const QueryWeighting& w,
                                                     const LossFunction& loss) {
  require_compatible(f, h, loss);
  if (w.pi.size() != f.domain().x_size()) {
    throw InvalidArgumentError("cost: sampling distribution does not match |X|");
  }
  const auto weights = w.weights_for(d);
  // Convolve the per-query contributions w(q) * L(Y_q, f(q)), Y_q ~ h(.|q).
  CostDistribution acc = CostDistribution::delta(Rational(0));
  for (std::size_t q = 0; q < weights.size(); ++q) {
    if (weights[q].is_zero()) continue;
    const auto dist = h.distribution(q);
    CostDistribution next;
    for (const auto& [partial, p] : acc.atoms()) {
      for (std::size_t y = 0; y < dist.size(); ++y) {
        if (dist[y].is_zero()) continue;
        next.add(partial + weights[q] * loss(y, f(q)), p * dist[y]);
      }
    }
    acc = std::move(next);
  }
  return acc;
}

Rational on_training_cost(const TargetFunction& f, const StochasticHypothesis& h,
                          const Dataset& d, const SamplingDistribution& pi,
                          const LossFunction& loss) {
  require_compatible(f, h, loss);
  Rational numerator;
  Rational denominator;
  for (const auto& p : d.pairs()) {
    numerator += pi[p.x] * expected_loss_at(f, h, p.x, loss);
    denominator += pi[p.x];
  }
  if (denominator.is_zero()) {
    throw InvalidArgumentError("on_training_cost: training inputs carry no sampling mass");
  }
  return numerator / denominator;
}

Rational empirical_cost(const TargetFunction& f, const Learner& learner, std::size_t m,
                        const SamplingDistribution& pi, const LossFunction& loss,
                        Replacement replacement, const EnumerationBudget& budget) {
  Rational total;
  for (const auto& d : enumerate_training_sets(f, m, pi, replacement, budget)) {
    const auto h = learner.train(f.domain(), d);
    total += d.weight() * on_training_cost(f, h, d, pi, loss);
  }
  return total;
}

}  // namespace nfl
