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

// Online learning under expert advice on binary payoff streams: prefix-sum
// leader boards, follow-the-leader and weighted forecasters, regret accounting,
// and the mapping of a payoff history onto a supervised training set.
//
// Iterations are 1-based in the traces (choice for iteration i uses totals
// through i-1); vectors are 0-based, so trace.choices[i-1] is iteration i.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nfl/domain.hpp"
#include "nfl/learners.hpp"
#include "nfl/rational.hpp"

namespace nfl {

class PayoffSequence {
 public:
  PayoffSequence() = default;
  explicit PayoffSequence(std::vector<std::uint8_t> bits);
  // "0110..." ; throws ParseError on any other character.
  static PayoffSequence parse(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_.at(i); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string str() const;

  friend bool operator==(const PayoffSequence&, const PayoffSequence&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct LeaderBoard {
  // accumulated[k][i] = pi_k(i) for i = 0..n.
  std::vector<std::vector<std::int64_t>> accumulated;
  // leader[i] / laggard[i]: argmax / argmin of pi_k(i), lowest index on ties.
  std::vector<std::size_t> leader;
  std::vector<std::size_t> laggard;
};

LeaderBoard leaderboard(const std::vector<PayoffSequence>& sequences, std::size_t n);

struct StrategyTrace {
  std::vector<std::size_t> choices;   // sequence followed at iteration i
  std::vector<std::uint8_t> payoffs;  // v_{K+1}(i)
  std::vector<std::int64_t> regret;   // max_k pi_k(i) - sum_{j<=i} payoff(j)
  std::int64_t total_payoff() const;
  std::int64_t max_regret() const;
};

// v_{K+1}(i) = v_{k+(i-1)}(i); the empty history picks index 0.
StrategyTrace ftl_strategy(const std::vector<PayoffSequence>& sequences, std::size_t n);

// Follows argmax_k (1 + eta)^{pi_k(i-1)}, ties to the lowest index.
StrategyTrace ewa_strategy(const std::vector<PayoffSequence>& sequences, std::size_t n,
                           const Rational& eta);

// A strategy as a rule for the next choice after `observed` iterations.
struct Strategy {
  enum class Kind { kFtl, kEwa };
  Kind kind = Kind::kFtl;
  Rational eta{1};

  static Strategy ftl() { return {}; }
  static Strategy ewa(Rational eta) { return {Kind::kEwa, std::move(eta)}; }

  std::string name() const;
  std::size_t next_choice(const std::vector<PayoffSequence>& sequences,
                          std::size_t observed) const;
  StrategyTrace run(const std::vector<PayoffSequence>& sequences, std::size_t n) const;
};

struct GapRow {
  std::int64_t gap = 0;  // pi_{k+}(n) - pi_{k-}(n)
  std::int64_t max_final_regret = 0;
  std::int64_t max_running_regret = 0;
  std::uint64_t count_pairs = 0;

  friend bool operator==(const GapRow&, const GapRow&) = default;
};

inline constexpr std::size_t kMaxGapHorizon = 14;

// Every ordered pair of length-n binary sequences (4^n of them) under FTL,
// grouped by final gap. One row per gap 0..n. Rows combine by max and sum,
// so the result is independent of `workers`.
std::vector<GapRow> gap_exhaustive(std::size_t n, unsigned workers = 1);

// All ordered pairs with final gap g, for inspection.
std::vector<std::pair<PayoffSequence, PayoffSequence>> pairs_with_gap(std::size_t n,
                                                                      std::int64_t gap);

// Payoff history mapped onto a binary supervised problem over the window
// {0, ..., m}: inputs 0..m-1 are the training set, input m the query.
struct SupervisedEmbedding {
  std::size_t m = 0;
  std::vector<std::size_t> labels;                  // d_Y
  std::vector<PayoffSequence> sequences;            // v_k, length >= m + 1
  std::vector<std::vector<std::size_t>> training;   // g_k(x), x < m

  std::size_t query() const { return m; }
  FiniteDomain window() const { return FiniteDomain(m + 1, 2); }
  Dataset dataset() const;
  // g_k over the whole window, with the free value g_k(m) = next_value.
  TargetFunction considered_function(std::size_t k, std::size_t next_value) const;
};

// g_k(x) = d_Y(x) iff v_k(x) = 1 on the training window.
SupervisedEmbedding embed_to_supervised(const std::vector<PayoffSequence>& sequences,
                                        const std::vector<std::size_t>& labels, std::size_t m);

struct EmbeddingOutcome {
  Rational cost;
  std::uint8_t payoff = 0;
};

// C = 1 - [h(m) = f(m)], payoff = 1 - C.
EmbeddingOutcome embedding_cost_equivalence(const SupervisedEmbedding& embedding,
                                            std::size_t f_next, std::size_t h_next);

// The strategy as a supervised learner over fixed considered functions: the
// training pairs, in order, are the iterations; v_k(i) = [g_k(x_i) = y_i].
// Memorizes d and predicts g_choice off the training set.
Learner embedded_strategy_learner(Strategy strategy, std::vector<TargetFunction> considered);

std::vector<PayoffSequence> read_sequences(std::istream& is);
void write_sequences(std::ostream& os, const std::vector<PayoffSequence>& sequences);

}  // namespace nfl
