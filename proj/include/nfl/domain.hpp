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

// Finite input/output spaces and the objects that live on them: target
// functions, hypotheses, datasets, priors, and their exhaustive enumeration.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nfl/rational.hpp"

namespace nfl {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

struct EnumerationBudget {
  std::uint64_t max_items = kDefaultEnumerationCap;
};

// base^exponent, or nullopt once the value passes `cap`.
std::optional<std::uint64_t> bounded_pow(std::uint64_t base, std::uint64_t exponent,
                                         std::uint64_t cap);

// X = {0..x_size-1}, Y = {0..y_size-1}.
class FiniteDomain {
 public:
  FiniteDomain(std::size_t x_size, std::size_t y_size);

  std::size_t x_size() const { return x_size_; }
  std::size_t y_size() const { return y_size_; }
  bool is_binary() const { return y_size_ == 2; }

  // |Y|^|X|; throws BudgetExceededError when above the cap.
  std::uint64_t function_count(const EnumerationBudget& budget = {}) const;

  friend bool operator==(const FiniteDomain&, const FiniteDomain&) = default;

 private:
  std::size_t x_size_;
  std::size_t y_size_;
};

// A single-valued f : X -> Y.
class TargetFunction {
 public:
  TargetFunction(FiniteDomain domain, std::vector<std::size_t> outputs);

  static TargetFunction constant(FiniteDomain domain, std::size_t label);

  const FiniteDomain& domain() const { return domain_; }
  const std::vector<std::size_t>& outputs() const { return outputs_; }
  std::size_t operator()(std::size_t x) const { return outputs_.at(x); }

  // Outputs as a digit string ("0110") when |Y| <= 10, else comma separated.
  std::string str() const;

  friend bool operator==(const TargetFunction& a, const TargetFunction& b) {
    return a.domain_ == b.domain_ && a.outputs_ == b.outputs_;
  }
  friend auto operator<=>(const TargetFunction& a, const TargetFunction& b) {
    return a.outputs_ <=> b.outputs_;
  }

 private:
  FiniteDomain domain_;
  std::vector<std::size_t> outputs_;
};

// h(y | x): one exact distribution over Y per input.
class StochasticHypothesis {
 public:
  StochasticHypothesis(FiniteDomain domain, std::vector<std::vector<Rational>> per_query);

  static StochasticHypothesis deterministic(FiniteDomain domain,
                                            const std::vector<std::size_t>& outputs);
  static StochasticHypothesis deterministic(const TargetFunction& f) {
    return deterministic(f.domain(), f.outputs());
  }
  static StochasticHypothesis uniform(FiniteDomain domain);
  // weight * a + (1 - weight) * b, pointwise per query.
  static StochasticHypothesis mix(const StochasticHypothesis& a, const StochasticHypothesis& b,
                                  const Rational& weight);

  const FiniteDomain& domain() const { return domain_; }
  const Rational& prob(std::size_t x, std::size_t y) const { return per_query_.at(x).at(y); }
  std::span<const Rational> distribution(std::size_t x) const { return per_query_.at(x); }

  // The label carrying all mass at x, if the query distribution is a delta.
  std::optional<std::size_t> deterministic_output(std::size_t x) const;
  bool is_deterministic() const;

  friend bool operator==(const StochasticHypothesis& a, const StochasticHypothesis& b) {
    return a.domain_ == b.domain_ && a.per_query_ == b.per_query_;
  }

 private:
  FiniteDomain domain_;
  std::vector<std::vector<Rational>> per_query_;
};

struct LabeledPoint {
  std::size_t x;
  std::size_t y;
  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

// Ordered training pairs plus the probability of the input sequence d_X.
class Dataset {
 public:
  explicit Dataset(std::vector<LabeledPoint> pairs, Rational weight = Rational(1));

  const std::vector<LabeledPoint>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const Rational& weight() const { return weight_; }

  std::vector<std::size_t> inputs() const;
  std::vector<std::size_t> labels() const;
  bool contains_input(std::size_t x) const;
  std::size_t distinct_input_count() const;
  // True when no input of the domain lies off the training set.
  bool covers(const FiniteDomain& domain) const;

  // f agrees with every pair.
  bool consistent_with(const TargetFunction& f) const;

  // All pairs but the one at `index`, with weight 1. Used for leave-one-out.
  Dataset without(std::size_t index) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.pairs_ == b.pairs_ && a.weight_ == b.weight_;
  }

 private:
  std::vector<LabeledPoint> pairs_;
  Rational weight_;
};

// pi(x), the IID input sampling distribution.
class SamplingDistribution {
 public:
  explicit SamplingDistribution(std::vector<Rational> weights);
  static SamplingDistribution uniform(std::size_t x_size);

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t x) const { return weights_.at(x); }
  const std::vector<Rational>& weights() const { return weights_; }
  bool is_uniform() const;

  friend bool operator==(const SamplingDistribution&, const SamplingDistribution&) = default;

 private:
  std::vector<Rational> weights_;
};

// A distribution over a finite, possibly sparse, set of target functions.
class Prior {
 public:
  Prior(std::vector<TargetFunction> support, std::vector<Rational> weights);

  static Prior uniform(const FiniteDomain& domain, const EnumerationBudget& budget = {});
  static Prior uniform_over(std::vector<TargetFunction> support);
  static Prior delta(TargetFunction f);

  const std::vector<TargetFunction>& support() const { return support_; }
  const std::vector<Rational>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  friend bool operator==(const Prior&, const Prior&) = default;

 private:
  std::vector<TargetFunction> support_;
  std::vector<Rational> weights_;
};

// Lazy, random-access view of all |Y|^|X| functions in lexicographic order of
// their output vectors (input 0 is the most significant digit).
class FunctionStream {
 public:
  class iterator {
   public:
    using value_type = TargetFunction;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const FunctionStream* stream, std::uint64_t index)
        : stream_(stream), index_(index) {}

    TargetFunction operator*() const { return stream_->at(index_); }
    iterator& operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++index_;
      return copy;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.index_ == b.index_; }

   private:
    const FunctionStream* stream_ = nullptr;
    std::uint64_t index_ = 0;
  };

  FunctionStream(FiniteDomain domain, std::uint64_t count) : domain_(domain), count_(count) {}

  std::uint64_t size() const { return count_; }
  TargetFunction at(std::uint64_t index) const;
  // Inverse of at().
  std::uint64_t index_of(const TargetFunction& f) const;

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, count_}; }

 private:
  FiniteDomain domain_;
  std::uint64_t count_;
};

// Throws BudgetExceededError if |Y|^|X| exceeds the cap.
FunctionStream enumerate_functions(const FiniteDomain& domain,
                                   const EnumerationBudget& budget = {});

enum class Replacement { kWith, kWithout };

// Lazy stream of every training set of size m drawn from pi for a fixed f.
// Input sequences are visited as an odometer over the support of pi, so the
// order is lexicographic in d_X.
class DatasetStream {
 public:
  class iterator {
   public:
    using value_type = Dataset;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    explicit iterator(const DatasetStream* stream);

    Dataset operator*() const;
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

   private:
    bool has_repeat() const;

    const DatasetStream* stream_ = nullptr;
    std::vector<std::size_t> digits_;
    bool done_ = true;
  };

  DatasetStream(TargetFunction f, std::size_t m, SamplingDistribution pi, Replacement replacement,
                const EnumerationBudget& budget);

  iterator begin() const { return iterator(this); }
  std::default_sentinel_t end() const { return {}; }

  const TargetFunction& target() const { return f_; }
  std::size_t m() const { return m_; }

 private:
  friend class iterator;

  TargetFunction f_;
  std::size_t m_;
  SamplingDistribution pi_;
  Replacement replacement_;
  std::vector<std::size_t> support_;  // inputs with pi(x) > 0
  Rational normalizer_{1};            // sum of raw products over yielded sequences
};

DatasetStream enumerate_training_sets(const TargetFunction& f, std::size_t m,
                                      const SamplingDistribution& pi,
                                      Replacement replacement = Replacement::kWith,
                                      const EnumerationBudget& budget = {});

// P(f | d) under the noise-free vertical likelihood: restrict to consistent
// functions and renormalize.
Prior posterior_over_functions(const Prior& prior, const Dataset& d);

// Prior drawn from the flat Dirichlet over all |Y|^|X| functions. The sample
// is the vector of spacings of n-1 sorted points on the grid {0, ..., 2^32},
// so every weight is an exact multiple of 2^-32 and the weights sum to 1.
inline constexpr int kRandomPriorGridBits = 32;
Prior sample_random_prior(const FiniteDomain& domain, std::uint64_t seed,
                          const EnumerationBudget& budget = {});

}  // namespace nfl
