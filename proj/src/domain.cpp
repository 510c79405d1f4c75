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

#include "nfl/domain.hpp"

#include <algorithm>
#include <set>

#include "nfl/errors.hpp"
#include "nfl/rng.hpp"

namespace nfl {

std::optional<std::uint64_t> bounded_pow(std::uint64_t base, std::uint64_t exponent,
                                         std::uint64_t cap) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > cap / base) return std::nullopt;
    result *= base;
    if (result > cap) return std::nullopt;
  }
  return result;
}

// -- FiniteDomain -------------------------------------------------------------

FiniteDomain::FiniteDomain(std::size_t x_size, std::size_t y_size)
    : x_size_(x_size), y_size_(y_size) {
  if (x_size == 0 || y_size == 0) {
    throw InvalidArgumentError("FiniteDomain: |X| and |Y| must be positive");
  }
}

std::uint64_t FiniteDomain::function_count(const EnumerationBudget& budget) const {
  auto count = bounded_pow(y_size_, x_size_, budget.max_items);
  if (!count) {
    throw BudgetExceededError("|Y|^|X| = " + std::to_string(y_size_) + "^" +
                              std::to_string(x_size_) + " exceeds the enumeration cap of " +
                              std::to_string(budget.max_items));
  }
  return *count;
}

// -- TargetFunction -----------------------------------------------------------

TargetFunction::TargetFunction(FiniteDomain domain, std::vector<std::size_t> outputs)
    : domain_(domain), outputs_(std::move(outputs)) {
  if (outputs_.size() != domain_.x_size()) {
    throw InvalidArgumentError("TargetFunction: expected " + std::to_string(domain_.x_size()) +
                               " outputs, got " + std::to_string(outputs_.size()));
  }
  for (std::size_t y : outputs_) {
    if (y >= domain_.y_size()) throw InvalidArgumentError("TargetFunction: output out of range");
  }
}

TargetFunction TargetFunction::constant(FiniteDomain domain, std::size_t label) {
  return TargetFunction(domain, std::vector<std::size_t>(domain.x_size(), label));
}

std::string TargetFunction::str() const {
  std::string out;
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (domain_.y_size() <= 10) {
      out.push_back(static_cast<char>('0' + outputs_[i]));
    } else {
      if (i) out.push_back(',');
      out += std::to_string(outputs_[i]);
    }
  }
  return out;
}

// -- StochasticHypothesis -----------------------------------------------------

StochasticHypothesis::StochasticHypothesis(FiniteDomain domain,
                                           std::vector<std::vector<Rational>> per_query)
    : domain_(domain), per_query_(std::move(per_query)) {
  if (per_query_.size() != domain_.x_size()) {
    throw InvalidArgumentError("StochasticHypothesis: one distribution per input required");
  }
  for (const auto& dist : per_query_) {
    if (dist.size() != domain_.y_size()) {
      throw InvalidArgumentError("StochasticHypothesis: distribution has wrong arity");
    }
    Rational total;
    for (const auto& p : dist) {
      if (p.sign() < 0) throw InvalidArgumentError("StochasticHypothesis: negative probability");
      total += p;
    }
    if (total != Rational(1)) {
      throw InvalidArgumentError("StochasticHypothesis: query distribution sums to " +
                                 total.str());
    }
  }
}

StochasticHypothesis StochasticHypothesis::deterministic(FiniteDomain domain,
                                                         const std::vector<std::size_t>& outputs) {
  if (outputs.size() != domain.x_size()) {
    throw InvalidArgumentError("deterministic hypothesis: wrong number of outputs");
  }
  std::vector<std::vector<Rational>> per_query(domain.x_size(),
                                               std::vector<Rational>(domain.y_size()));
  for (std::size_t x = 0; x < outputs.size(); ++x) {
    if (outputs[x] >= domain.y_size()) {
      throw InvalidArgumentError("deterministic hypothesis: output out of range");
    }
    per_query[x][outputs[x]] = Rational(1);
  }
  return StochasticHypothesis(domain, std::move(per_query));
}

StochasticHypothesis StochasticHypothesis::uniform(FiniteDomain domain) {
  const Rational p(1, static_cast<std::int64_t>(domain.y_size()));
  return StochasticHypothesis(
      domain, std::vector<std::vector<Rational>>(domain.x_size(),
                                                 std::vector<Rational>(domain.y_size(), p)));
}

StochasticHypothesis StochasticHypothesis::mix(const StochasticHypothesis& a,
                                               const StochasticHypothesis& b,
                                               const Rational& weight) {
  if (!(a.domain_ == b.domain_)) throw InvalidArgumentError("mix: domain mismatch");
  if (weight.sign() < 0 || weight > Rational(1)) {
    throw InvalidArgumentError("mix: weight must lie in [0, 1]");
  }
  const Rational rest = Rational(1) - weight;
  auto per_query = a.per_query_;
  for (std::size_t x = 0; x < per_query.size(); ++x) {
    for (std::size_t y = 0; y < per_query[x].size(); ++y) {
      per_query[x][y] = weight * a.per_query_[x][y] + rest * b.per_query_[x][y];
    }
  }
  return StochasticHypothesis(a.domain_, std::move(per_query));
}

std::optional<std::size_t> StochasticHypothesis::deterministic_output(std::size_t x) const {
  const auto& dist = per_query_.at(x);
  for (std::size_t y = 0; y < dist.size(); ++y) {
    if (dist[y] == Rational(1)) return y;
  }
  return std::nullopt;
}

bool StochasticHypothesis::is_deterministic() const {
  for (std::size_t x = 0; x < per_query_.size(); ++x) {
    if (!deterministic_output(x)) return false;
  }
  return true;
}

// -- Dataset ------------------------------------------------------------------

Dataset::Dataset(std::vector<LabeledPoint> pairs, Rational weight)
    : pairs_(std::move(pairs)), weight_(std::move(weight)) {
  if (weight_.sign() <= 0 || weight_ > Rational(1)) {
    throw InvalidArgumentError("Dataset: weight must lie in (0, 1], got " + weight_.str());
  }
}

std::vector<std::size_t> Dataset::inputs() const {
  std::vector<std::size_t> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.x);
  return out;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.y);
  return out;
}

bool Dataset::contains_input(std::size_t x) const {
  return std::any_of(pairs_.begin(), pairs_.end(), [x](const LabeledPoint& p) { return p.x == x; });
}

std::size_t Dataset::distinct_input_count() const {
  std::set<std::size_t> seen;
  for (const auto& p : pairs_) seen.insert(p.x);
  return seen.size();
}

bool Dataset::covers(const FiniteDomain& domain) const {
  for (std::size_t x = 0; x < domain.x_size(); ++x) {
    if (!contains_input(x)) return false;
  }
  return true;
}

bool Dataset::consistent_with(const TargetFunction& f) const {
  return std::all_of(pairs_.begin(), pairs_.end(), [&f](const LabeledPoint& p) {
    return p.x < f.domain().x_size() && f(p.x) == p.y;
  });
}

Dataset Dataset::without(std::size_t index) const {
  if (index >= pairs_.size()) throw InvalidArgumentError("Dataset::without: index out of range");
  std::vector<LabeledPoint> rest;
  rest.reserve(pairs_.size() - 1);
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i != index) rest.push_back(pairs_[i]);
  }
  return Dataset(std::move(rest));
}

// -- SamplingDistribution -----------------------------------------------------

SamplingDistribution::SamplingDistribution(std::vector<Rational> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgumentError("SamplingDistribution: empty");
  Rational total;
  for (const auto& w : weights_) {
    if (w.sign() < 0) throw InvalidArgumentError("SamplingDistribution: negative weight");
    total += w;
  }
  if (total != Rational(1)) {
    throw InvalidArgumentError("SamplingDistribution: weights sum to " + total.str());
  }
}

SamplingDistribution SamplingDistribution::uniform(std::size_t x_size) {
  if (x_size == 0) throw InvalidArgumentError("SamplingDistribution: empty");
  return SamplingDistribution(
      std::vector<Rational>(x_size, Rational(1, static_cast<std::int64_t>(x_size))));
}

bool SamplingDistribution::is_uniform() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [this](const Rational& w) { return w == weights_.front(); });
}

// -- Prior --------------------------------------------------------------------

Prior::Prior(std::vector<TargetFunction> support, std::vector<Rational> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty()) throw InvalidArgumentError("Prior: empty support");
  if (support_.size() != weights_.size()) {
    throw InvalidArgumentError("Prior: support and weights differ in length");
  }
  Rational total;
  for (const auto& w : weights_) {
    if (w.sign() < 0) throw InvalidArgumentError("Prior: negative weight");
    total += w;
  }
  if (total != Rational(1)) throw InvalidArgumentError("Prior: weights sum to " + total.str());
  std::set<std::vector<std::size_t>> seen;
  for (const auto& f : support_) {
    if (!(f.domain() == support_.front().domain())) {
      throw InvalidArgumentError("Prior: support functions live on different domains");
    }
    if (!seen.insert(f.outputs()).second) {
      throw InvalidArgumentError("Prior: duplicate support function " + f.str());
    }
  }
}

Prior Prior::uniform(const FiniteDomain& domain, const EnumerationBudget& budget) {
  std::vector<TargetFunction> support;
  for (auto f : enumerate_functions(domain, budget)) support.push_back(std::move(f));
  return uniform_over(std::move(support));
}

Prior Prior::uniform_over(std::vector<TargetFunction> support) {
  const Rational w(1, static_cast<std::int64_t>(support.size()));
  std::vector<Rational> weights(support.size(), w);
  return Prior(std::move(support), std::move(weights));
}

Prior Prior::delta(TargetFunction f) {
  return Prior({std::move(f)}, {Rational(1)});
}

// -- Enumeration --------------------------------------------------------------

TargetFunction FunctionStream::at(std::uint64_t index) const {
  if (index >= count_) throw InvalidArgumentError("FunctionStream::at: index out of range");
  std::vector<std::size_t> outputs(domain_.x_size());
  for (std::size_t i = domain_.x_size(); i-- > 0;) {
    outputs[i] = static_cast<std::size_t>(index % domain_.y_size());
    index /= domain_.y_size();
  }
  return TargetFunction(domain_, std::move(outputs));
}

std::uint64_t FunctionStream::index_of(const TargetFunction& f) const {
  std::uint64_t index = 0;
  for (std::size_t y : f.outputs()) index = index * domain_.y_size() + y;
  return index;
}

FunctionStream enumerate_functions(const FiniteDomain& domain, const EnumerationBudget& budget) {
  return FunctionStream(domain, domain.function_count(budget));
}

DatasetStream::DatasetStream(TargetFunction f, std::size_t m, SamplingDistribution pi,
                             Replacement replacement, const EnumerationBudget& budget)
    : f_(std::move(f)), m_(m), pi_(std::move(pi)), replacement_(replacement) {
  const auto& domain = f_.domain();
  if (m_ == 0) throw InvalidArgumentError("enumerate_training_sets: m must be at least 1");
  if (pi_.size() != domain.x_size()) {
    throw InvalidArgumentError("enumerate_training_sets: pi has the wrong length");
  }
  for (std::size_t x = 0; x < pi_.size(); ++x) {
    if (!pi_[x].is_zero()) support_.push_back(x);
  }
  if (replacement_ == Replacement::kWithout) {
    if (m_ > support_.size()) {
      throw InvalidArgumentError(
          "enumerate_training_sets: fewer than m inputs have positive probability");
    }
  }
  if (!bounded_pow(support_.size(), m_, budget.max_items)) {
    throw BudgetExceededError("enumerate_training_sets: " + std::to_string(support_.size()) +
                              "^" + std::to_string(m_) + " sequences exceed the cap");
  }
  if (replacement_ == Replacement::kWithout) {
    // Sum of prod pi over ordered distinct sequences = m! * e_m(pi).
    std::vector<Rational> elementary(m_ + 1);
    elementary[0] = Rational(1);
    for (std::size_t x : support_) {
      for (std::size_t k = m_; k >= 1; --k) elementary[k] += elementary[k - 1] * pi_[x];
    }
    Rational factorial(1);
    for (std::size_t k = 2; k <= m_; ++k) factorial *= Rational(static_cast<std::int64_t>(k));
    normalizer_ = elementary[m_] * factorial;
  }
}

DatasetStream::iterator::iterator(const DatasetStream* stream)
    : stream_(stream), digits_(stream->m_, 0), done_(false) {
  if (stream_->replacement_ == Replacement::kWithout && has_repeat()) ++*this;
}

bool DatasetStream::iterator::has_repeat() const {
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    for (std::size_t j = i + 1; j < digits_.size(); ++j) {
      if (digits_[i] == digits_[j]) return true;
    }
  }
  return false;
}

Dataset DatasetStream::iterator::operator*() const {
  std::vector<LabeledPoint> pairs;
  pairs.reserve(digits_.size());
  Rational weight(1);
  for (std::size_t digit : digits_) {
    const std::size_t x = stream_->support_[digit];
    pairs.push_back({x, stream_->f_(x)});
    weight *= stream_->pi_[x];
  }
  if (stream_->replacement_ == Replacement::kWithout) weight /= stream_->normalizer_;
  return Dataset(std::move(pairs), std::move(weight));
}

DatasetStream::iterator& DatasetStream::iterator::operator++() {
  const std::size_t base = stream_->support_.size();
  do {
    std::size_t i = digits_.size();
    while (i > 0) {
      --i;
      if (++digits_[i] < base) break;
      digits_[i] = 0;
      if (i == 0) {
        done_ = true;
        return *this;
      }
    }
  } while (stream_->replacement_ == Replacement::kWithout && has_repeat());
  return *this;
}

DatasetStream enumerate_training_sets(const TargetFunction& f, std::size_t m,
                                      const SamplingDistribution& pi, Replacement replacement,
                                      const EnumerationBudget& budget) {
  return DatasetStream(f, m, pi, replacement, budget);
}

// -- Priors -------------------------------------------------------------------

Prior posterior_over_functions(const Prior& prior, const Dataset& d) {
  std::vector<TargetFunction> support;
  std::vector<Rational> weights;
  Rational mass;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (d.consistent_with(prior.support()[i])) {
      support.push_back(prior.support()[i]);
      weights.push_back(prior.weights()[i]);
      mass += prior.weights()[i];
    }
  }
  if (mass.is_zero()) {
    throw NoConsistentFunctionError("posterior_over_functions: no support function with "
                                    "positive prior mass agrees with the dataset");
  }
  for (auto& w : weights) w /= mass;
  return Prior(std::move(support), std::move(weights));
}

Prior sample_random_prior(const FiniteDomain& domain, std::uint64_t seed,
                          const EnumerationBudget& budget) {
  const auto functions = enumerate_functions(domain, budget);
  const std::uint64_t n = functions.size();
  constexpr std::uint64_t kGrid = std::uint64_t{1} << kRandomPriorGridBits;

  Rng rng(seed);
  std::vector<std::uint64_t> cuts;
  cuts.reserve(n + 1);
  cuts.push_back(0);
  for (std::uint64_t i = 0; i + 1 < n; ++i) cuts.push_back(rng.below(kGrid + 1));
  cuts.push_back(kGrid);
  std::sort(cuts.begin(), cuts.end());

  std::vector<TargetFunction> support;
  std::vector<Rational> weights;
  support.reserve(n);
  weights.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    support.push_back(functions.at(i));
    weights.emplace_back(static_cast<std::int64_t>(cuts[i + 1] - cuts[i]),
                         static_cast<std::int64_t>(kGrid));
  }
  return Prior(std::move(support), std::move(weights));
}

}  // namespace nfl
