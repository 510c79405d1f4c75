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

#include "nfl/olea.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "nfl/errors.hpp"
#include "nfl/parallel.hpp"

namespace nfl {

namespace {

void require_horizon(const std::vector<PayoffSequence>& sequences, std::size_t n,
                     std::string_view who) {
  if (sequences.empty()) throw InvalidArgumentError(std::string(who) + ": no sequences");
  for (const auto& s : sequences) {
    if (s.size() < n) {
      throw InvalidArgumentError(std::string(who) + ": sequence shorter than horizon " +
                                 std::to_string(n));
    }
  }
}

std::vector<std::int64_t> totals_after(const std::vector<PayoffSequence>& sequences,
                                       std::size_t observed) {
  std::vector<std::int64_t> totals(sequences.size(), 0);
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    for (std::size_t i = 0; i < observed; ++i) totals[k] += sequences[k][i];
  }
  return totals;
}

}  // namespace

// -- PayoffSequence -----------------------------------------------------------

PayoffSequence::PayoffSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InvalidArgumentError("PayoffSequence: entries must be 0 or 1");
  }
}

PayoffSequence PayoffSequence::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParseError("payoff sequence: unexpected character '" + std::string(1, c) + "'");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return PayoffSequence(std::move(bits));
}

std::string PayoffSequence::str() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(static_cast<char>('0' + b));
  return out;
}

// -- Leader boards and strategies ---------------------------------------------

LeaderBoard leaderboard(const std::vector<PayoffSequence>& sequences, std::size_t n) {
  if (n == 0) throw InvalidArgumentError("leaderboard: horizon must be positive");
  require_horizon(sequences, n, "leaderboard");
  LeaderBoard board;
  board.accumulated.assign(sequences.size(), std::vector<std::int64_t>(n + 1, 0));
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    for (std::size_t i = 1; i <= n; ++i) {
      board.accumulated[k][i] = board.accumulated[k][i - 1] + sequences[k][i - 1];
    }
  }
  board.leader.resize(n + 1);
  board.laggard.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t k = 1; k < sequences.size(); ++k) {
      if (board.accumulated[k][i] > board.accumulated[hi][i]) hi = k;
      if (board.accumulated[k][i] < board.accumulated[lo][i]) lo = k;
    }
    board.leader[i] = hi;
    board.laggard[i] = lo;
  }
  return board;
}

std::int64_t StrategyTrace::total_payoff() const {
  std::int64_t total = 0;
  for (auto p : payoffs) total += p;
  return total;
}

std::int64_t StrategyTrace::max_regret() const {
  return regret.empty() ? 0 : *std::max_element(regret.begin(), regret.end());
}

std::string Strategy::name() const {
  return kind == Kind::kFtl ? "ftl" : "ewa:" + eta.str();
}

std::size_t Strategy::next_choice(const std::vector<PayoffSequence>& sequences,
                                  std::size_t observed) const {
  const auto totals = totals_after(sequences, observed);
  if (kind == Kind::kFtl) {
    return static_cast<std::size_t>(std::max_element(totals.begin(), totals.end()) -
                                    totals.begin());
  }
  if (eta.sign() <= 0) throw InvalidArgumentError("ewa: eta must be positive");
  const Rational base = Rational(1) + eta;
  std::size_t best = 0;
  Rational best_weight = base.pow(totals[0]);
  for (std::size_t k = 1; k < totals.size(); ++k) {
    Rational w = base.pow(totals[k]);
    if (w > best_weight) {
      best = k;
      best_weight = std::move(w);
    }
  }
  return best;
}

StrategyTrace Strategy::run(const std::vector<PayoffSequence>& sequences, std::size_t n) const {
  require_horizon(sequences, n, "strategy");
  if (kind == Kind::kEwa && eta.sign() <= 0) {
    throw InvalidArgumentError("ewa: eta must be positive");
  }
  StrategyTrace trace;
  std::vector<std::int64_t> totals(sequences.size(), 0);
  std::int64_t earned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t choice = next_choice(sequences, i);
    const std::uint8_t payoff = sequences[choice][i];
    earned += payoff;
    for (std::size_t k = 0; k < sequences.size(); ++k) totals[k] += sequences[k][i];
    trace.choices.push_back(choice);
    trace.payoffs.push_back(payoff);
    trace.regret.push_back(*std::max_element(totals.begin(), totals.end()) - earned);
  }
  return trace;
}

StrategyTrace ftl_strategy(const std::vector<PayoffSequence>& sequences, std::size_t n) {
  return Strategy::ftl().run(sequences, n);
}

StrategyTrace ewa_strategy(const std::vector<PayoffSequence>& sequences, std::size_t n,
                           const Rational& eta) {
  return Strategy::ewa(eta).run(sequences, n);
}

// -- Exhaustive gap table -----------------------------------------------------

std::vector<GapRow> gap_exhaustive(std::size_t n, unsigned workers) {
  if (n == 0 || n > kMaxGapHorizon) {
    throw BudgetExceededError("gap_exhaustive: horizon must lie in [1, " +
                              std::to_string(kMaxGapHorizon) + "], got " + std::to_string(n));
  }
  const std::uint64_t sequences = std::uint64_t{1} << n;

  // Bitmask FTL over K = 2; bit i is iteration i + 1.
  auto partial = parallel_map(sequences, workers, [n, sequences](std::size_t a) {
    std::vector<GapRow> rows(n + 1);
    for (std::uint64_t b = 0; b < sequences; ++b) {
      std::int64_t pa = 0;
      std::int64_t pb = 0;
      std::int64_t earned = 0;
      std::int64_t running = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t va = (a >> i) & 1;
        const std::int64_t vb = (b >> i) & 1;
        earned += pb > pa ? vb : va;
        pa += va;
        pb += vb;
        running = std::max(running, std::max(pa, pb) - earned);
      }
      const std::int64_t final_regret = std::max(pa, pb) - earned;
      auto& row = rows[static_cast<std::size_t>(pa > pb ? pa - pb : pb - pa)];
      row.max_final_regret = std::max(row.max_final_regret, final_regret);
      row.max_running_regret = std::max(row.max_running_regret, running);
      ++row.count_pairs;
    }
    return rows;
  });

  std::vector<GapRow> table(n + 1);
  for (std::size_t g = 0; g <= n; ++g) table[g].gap = static_cast<std::int64_t>(g);
  for (const auto& rows : partial) {
    for (std::size_t g = 0; g <= n; ++g) {
      table[g].max_final_regret = std::max(table[g].max_final_regret, rows[g].max_final_regret);
      table[g].max_running_regret =
          std::max(table[g].max_running_regret, rows[g].max_running_regret);
      table[g].count_pairs += rows[g].count_pairs;
    }
  }
  return table;
}

std::vector<std::pair<PayoffSequence, PayoffSequence>> pairs_with_gap(std::size_t n,
                                                                      std::int64_t gap) {
  if (n == 0 || n > kMaxGapHorizon) throw BudgetExceededError("pairs_with_gap: horizon too large");
  auto to_sequence = [n](std::uint64_t mask) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((mask >> i) & 1);
    return PayoffSequence(std::move(bits));
  };
  std::vector<std::pair<PayoffSequence, PayoffSequence>> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < count; ++a) {
    for (std::uint64_t b = 0; b < count; ++b) {
      const auto d = static_cast<std::int64_t>(__builtin_popcountll(a)) -
                     static_cast<std::int64_t>(__builtin_popcountll(b));
      if ((d < 0 ? -d : d) == gap) out.emplace_back(to_sequence(a), to_sequence(b));
    }
  }
  return out;
}

// -- Embedding ----------------------------------------------------------------

Dataset SupervisedEmbedding::dataset() const {
  std::vector<LabeledPoint> pairs;
  for (std::size_t x = 0; x < m; ++x) pairs.push_back({x, labels[x]});
  return Dataset(std::move(pairs));
}

TargetFunction SupervisedEmbedding::considered_function(std::size_t k,
                                                        std::size_t next_value) const {
  if (next_value > 1) throw InvalidArgumentError("considered_function: labels are binary");
  auto outputs = training.at(k);
  outputs.push_back(next_value);
  return TargetFunction(window(), std::move(outputs));
}

SupervisedEmbedding embed_to_supervised(const std::vector<PayoffSequence>& sequences,
                                        const std::vector<std::size_t>& labels, std::size_t m) {
  if (m == 0) throw InvalidArgumentError("embed_to_supervised: m must be positive");
  if (labels.size() != m) {
    throw InvalidArgumentError("embed_to_supervised: expected " + std::to_string(m) + " labels");
  }
  for (auto y : labels) {
    if (y > 1) throw InvalidArgumentError("embed_to_supervised: labels must be binary");
  }
  require_horizon(sequences, m + 1, "embed_to_supervised");

  SupervisedEmbedding e;
  e.m = m;
  e.labels = labels;
  e.sequences = sequences;
  for (const auto& v : sequences) {
    std::vector<std::size_t> g(m);
    for (std::size_t x = 0; x < m; ++x) g[x] = v[x] == 1 ? labels[x] : 1 - labels[x];
    e.training.push_back(std::move(g));
  }
  return e;
}

EmbeddingOutcome embedding_cost_equivalence(const SupervisedEmbedding& embedding,
                                            std::size_t f_next, std::size_t h_next) {
  (void)embedding;
  if (f_next > 1 || h_next > 1) throw InvalidArgumentError("embedding: labels are binary");
  EmbeddingOutcome out;
  out.cost = Rational(f_next == h_next ? 0 : 1);
  out.payoff = f_next == h_next ? 1 : 0;
  if (out.cost + Rational(out.payoff) != Rational(1)) {
    throw ConsistencyError("embedding: cost and payoff do not sum to 1");
  }
  return out;
}

Learner embedded_strategy_learner(Strategy strategy, std::vector<TargetFunction> considered) {
  if (considered.empty()) throw InvalidArgumentError("embedded learner: no considered functions");
  std::string name = "embedded:" + strategy.name();
  return Learner(std::move(name), [strategy = std::move(strategy),
                                   considered = std::move(considered)](const FiniteDomain& domain,
                                                                       const Dataset& d) {
    if (!domain.is_binary()) throw InvalidArgumentError("embedded learner: binary Y only");
    std::vector<PayoffSequence> payoffs;
    for (const auto& g : considered) {
      if (!(g.domain() == domain)) throw InvalidArgumentError("embedded learner: domain mismatch");
      std::vector<std::uint8_t> bits;
      for (const auto& p : d.pairs()) bits.push_back(g(p.x) == p.y ? 1 : 0);
      payoffs.emplace_back(std::move(bits));
    }
    const auto& chosen = considered[strategy.next_choice(payoffs, d.size())];
    std::vector<std::size_t> outputs = chosen.outputs();
    for (const auto& p : d.pairs()) outputs[p.x] = p.y;
    return StochasticHypothesis::deterministic(domain, outputs);
  });
}

// -- Sequence files -----------------------------------------------------------

std::vector<PayoffSequence> read_sequences(std::istream& is) {
  std::vector<PayoffSequence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(PayoffSequence::parse(line));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_sequences(std::ostream& os, const std::vector<PayoffSequence>& sequences) {
  for (const auto& s : sequences) os << s.str() << '\n';
}

}  // namespace nfl
