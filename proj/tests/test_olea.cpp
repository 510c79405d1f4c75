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


#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nfl/errors.hpp"
#include "nfl/nfl_engine.hpp"
#include "nfl/olea.hpp"

using namespace nfl;

namespace {

std::vector<PayoffSequence> seqs(std::initializer_list<const char*> texts) {
  std::vector<PayoffSequence> out;
  for (const char* t : texts) out.push_back(PayoffSequence::parse(t));
  return out;
}

struct OracleTrace {
  std::vector<std::size_t> choices;
  std::vector<std::int64_t> regret;
};

// Follow-the-leader written out directly from running totals.
OracleTrace oracle_ftl(const std::vector<std::vector<int>>& v, std::size_t n) {
  OracleTrace t;
  std::vector<std::int64_t> totals(v.size(), 0);
  std::int64_t earned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (totals[k] > totals[best]) best = k;
    }
    t.choices.push_back(best);
    earned += v[best][i];
    for (std::size_t k = 0; k < v.size(); ++k) totals[k] += v[k][i];
    t.regret.push_back(*std::max_element(totals.begin(), totals.end()) - earned);
  }
  return t;
}

std::vector<int> bits_of(std::uint64_t mask, std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (mask >> (n - 1 - i)) & 1;
  return out;
}

std::vector<PayoffSequence> random_sequences(std::size_t k, std::size_t n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<PayoffSequence> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = coin(gen) ? 1 : 0;
    out.emplace_back(std::move(bits));
  }
  return out;
}

}  // namespace

TEST_CASE("payoff sequence parsing") {
  const auto s = PayoffSequence::parse("0110");
  CHECK(s.size() == 4);
  CHECK(s[1] == 1);
  CHECK(s.str() == "0110");
  CHECK_THROWS_AS(PayoffSequence::parse("01a"), ParseError);
  CHECK_THROWS_AS(PayoffSequence({0, 2}), InvalidArgumentError);
}

TEST_CASE("leader board examples") {
  const auto board = leaderboard(seqs({"1010", "0111"}), 4);
  CHECK(board.accumulated[0] == std::vector<std::int64_t>{0, 1, 1, 2, 2});
  CHECK(board.accumulated[1] == std::vector<std::int64_t>{0, 0, 1, 2, 3});
  CHECK(board.leader == std::vector<std::size_t>{0, 0, 0, 0, 1});
  CHECK(board.laggard == std::vector<std::size_t>{0, 1, 0, 0, 0});
  CHECK_THROWS_AS(leaderboard(seqs({"1"}), 0), InvalidArgumentError);
  CHECK_THROWS_AS(leaderboard(seqs({"1"}), 2), InvalidArgumentError);
}

TEST_CASE("follow-the-leader examples") {
  for (std::size_t n : {1u, 5u, 9u}) {
    const std::string ones(n, '1');
    const std::string zeros(n, '0');
    const auto ahead = ftl_strategy(seqs({ones.c_str(), zeros.c_str()}), n);
    CHECK(ahead.max_regret() == 0);
    CHECK(ahead.total_payoff() == static_cast<std::int64_t>(n));
    const auto behind = ftl_strategy(seqs({zeros.c_str(), ones.c_str()}), n);
    CHECK(behind.max_regret() == 1);
    CHECK(behind.regret.back() == 1);
    CHECK(behind.choices.front() == 0);
    if (n > 1) CHECK(behind.choices[1] == 1);
  }
  // Alternating leaders: FTL is always one step late.
  const auto late = ftl_strategy(seqs({"010101", "101010"}), 6);
  CHECK(late.choices == std::vector<std::size_t>{0, 1, 0, 1, 0, 1});
  CHECK(late.total_payoff() == 0);
  CHECK(late.regret.back() == 3);
}

TEST_CASE("strategy traces match the oracle") {
  for (std::uint32_t seed = 1; seed <= 25; ++seed) {
    const std::size_t k = 2 + seed % 3;
    const auto s = random_sequences(k, 16, seed);
    std::vector<std::vector<int>> raw;
    for (const auto& p : s) raw.emplace_back(p.bits().begin(), p.bits().end());
    const auto oracle = oracle_ftl(raw, 16);
    const auto ftl = ftl_strategy(s, 16);
    CHECK(ftl.choices == oracle.choices);
    CHECK(ftl.regret == oracle.regret);
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(Strategy::ftl().next_choice(s, i) == ftl.choices[i]);
      CHECK(ftl.payoffs[i] == s[ftl.choices[i]][i]);
    }
    for (const Rational& eta : {Rational(1, 10), Rational(1), Rational(7, 2)}) {
      const auto ewa = ewa_strategy(s, 16, eta);
      CHECK(ewa.choices == ftl.choices);
      CHECK(Strategy::ewa(eta).run(s, 16).regret == ftl.regret);
    }
  }
  CHECK(Strategy::ftl().name() == "ftl");
  CHECK(Strategy::ewa(Rational(1)).name() == "ewa:1/1");
}

TEST_CASE("accumulated payoffs and regret increments") {
  for (std::uint32_t seed = 100; seed < 120; ++seed) {
    const auto s = random_sequences(3, 24, seed);
    const auto board = leaderboard(s, 24);
    for (const auto& row : board.accumulated) {
      for (std::size_t i = 1; i < row.size(); ++i) {
        CHECK(row[i] - row[i - 1] >= 0);
        CHECK(row[i] - row[i - 1] <= 1);
      }
    }
    const auto t = ftl_strategy(s, 24);
    std::int64_t previous = 0;
    for (auto r : t.regret) {
      CHECK(r - previous <= 1);
      CHECK(r - previous >= -1);
      previous = r;
    }
  }
}

TEST_CASE("gap table matches brute force") {
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<GapRow> expected(n + 1);
    for (std::size_t g = 0; g <= n; ++g) expected[g].gap = static_cast<std::int64_t>(g);
    for (std::uint64_t a = 0; a < (1u << n); ++a) {
      for (std::uint64_t b = 0; b < (1u << n); ++b) {
        const std::vector<std::vector<int>> v{bits_of(a, n), bits_of(b, n)};
        const auto t = oracle_ftl(v, n);
        const auto gap = std::abs(std::count(v[0].begin(), v[0].end(), 1) -
                                  std::count(v[1].begin(), v[1].end(), 1));
        auto& row = expected[gap];
        row.count_pairs += 1;
        row.max_final_regret = std::max(row.max_final_regret, t.regret.back());
        row.max_running_regret =
            std::max(row.max_running_regret, *std::max_element(t.regret.begin(), t.regret.end()));
      }
    }
    const auto rows = gap_exhaustive(n, 1 + n % 3);
    REQUIRE(rows.size() == n + 1);
    for (std::size_t g = 0; g <= n; ++g) {
      CAPTURE(n);
      CAPTURE(g);
      CHECK(rows[g].gap == expected[g].gap);
      CHECK(rows[g].count_pairs == expected[g].count_pairs);
      CHECK(rows[g].max_final_regret == expected[g].max_final_regret);
      CHECK(rows[g].max_running_regret == expected[g].max_running_regret);
    }
    CHECK(rows[n].max_final_regret == 1);
    if (n >= 3) CHECK(rows[n - 2].max_final_regret == 2);
  }
  CHECK(gap_exhaustive(10, 1) == gap_exhaustive(10, 4));
  CHECK_THROWS_AS(gap_exhaustive(kMaxGapHorizon + 1), BudgetExceededError);
}

TEST_CASE("pairs at full gap") {
  const auto pairs = pairs_with_gap(5, 5);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].first.str() != pairs[0].second.str());
  for (const auto& [a, b] : pairs) {
    CHECK(((a.str() == "11111" && b.str() == "00000") ||
           (a.str() == "00000" && b.str() == "11111")));
  }
  std::uint64_t total = 0;
  for (std::int64_t g = 0; g <= 5; ++g) total += pairs_with_gap(5, g).size();
  CHECK(total == 1024);
}

TEST_CASE("supervised embedding examples") {
  const auto s = seqs({"1101", "0110"});
  const std::vector<std::size_t> labels{1, 0, 1};
  const auto e = embed_to_supervised(s, labels, 3);
  CHECK(e.training[0] == std::vector<std::size_t>{1, 0, 0});
  CHECK(e.training[1] == std::vector<std::size_t>{0, 0, 1});
  CHECK(e.query() == 3);
  CHECK(e.dataset() == Dataset({{0, 1}, {1, 0}, {2, 1}}));
  CHECK(e.considered_function(1, 1).outputs() == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK_THROWS_AS(embed_to_supervised(s, labels, 4), InvalidArgumentError);
  CHECK_THROWS_AS(embed_to_supervised(s, {1, 0}, 3), InvalidArgumentError);
  CHECK_THROWS_AS(embed_to_supervised(s, {1, 2, 0}, 3), InvalidArgumentError);

  for (std::size_t f_next : {0u, 1u}) {
    for (std::size_t h_next : {0u, 1u}) {
      const auto out = embedding_cost_equivalence(e, f_next, h_next);
      CHECK(out.cost + Rational(out.payoff) == Rational(1));
      CHECK(out.payoff == (f_next == h_next ? 1 : 0));
    }
  }
}

TEST_CASE("embedding soundness and cost equivalence") {
  for (std::uint32_t seed = 0; seed < 30; ++seed) {
    const std::size_t m = 1 + seed % 5;
    const auto s = random_sequences(2 + seed % 2, m + 1, seed);
    std::vector<std::size_t> labels(m);
    for (std::size_t x = 0; x < m; ++x) labels[x] = (seed >> x) & 1;
    const auto e = embed_to_supervised(s, labels, m);
    for (std::size_t k = 0; k < s.size(); ++k) {
      for (std::size_t x = 0; x < m; ++x) {
        CHECK((e.training[k][x] == labels[x]) == (s[k][x] == 1));
      }
    }
    const auto trace = ftl_strategy(s, m + 1);
    const auto pi = SamplingDistribution::uniform(m + 1);
    const auto loss = zero_one_loss(2);
    for (std::size_t f_next : {0u, 1u}) {
      // The next payoff fixes g_k(m) once the next label is known.
      std::vector<TargetFunction> considered;
      for (std::size_t k = 0; k < s.size(); ++k) {
        considered.push_back(e.considered_function(k, s[k][m] == 1 ? f_next : 1 - f_next));
      }
      auto f_outputs = labels;
      f_outputs.push_back(f_next);
      const TargetFunction f(e.window(), f_outputs);
      const auto learner = embedded_strategy_learner(Strategy::ftl(), considered);
      CHECK(learner.name() == "embedded:ftl");
      const auto h = learner.train(e.window(), e.dataset());
      const auto h_next = *h.deterministic_output(m);
      CHECK(h_next == considered[trace.choices[m]](m));
      const Rational cost = ots_cost(f, h, e.dataset(), pi, loss);
      CHECK(cost == embedding_cost_equivalence(e, f_next, h_next).cost);
      CHECK(cost == Rational(1 - trace.payoffs[m]));
    }
  }
}

TEST_CASE("embedded strategies obey the uniform-f identity") {
  const FiniteDomain domain(4, 2);
  const std::vector<TargetFunction> considered{TargetFunction(domain, {0, 1, 1, 0}),
                                               TargetFunction(domain, {1, 1, 0, 0}),
                                               TargetFunction::constant(domain, 1)};
  const auto report = nfl_f_average_check(
      {embedded_strategy_learner(Strategy::ftl(), considered),
       embedded_strategy_learner(Strategy::ewa(Rational(1, 2)), considered), majority_learner()},
      domain, 2, SamplingDistribution::uniform(4), zero_one_loss(domain));
  CHECK(report.pass);
  CHECK_THROWS_AS(embedded_strategy_learner(Strategy::ftl(), {}), InvalidArgumentError);
}

TEST_CASE("sequence files round-trip") {
  const auto s = seqs({"0110", "1", "000111"});
  std::ostringstream os;
  write_sequences(os, s);
  std::istringstream is(os.str());
  CHECK(read_sequences(is) == s);

  std::istringstream commented("# header\n\n0101\r\n11\n");
  CHECK(read_sequences(commented) == seqs({"0101", "11"}));
  std::istringstream bad("0101\n01x1\n");
  try {
    read_sequences(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
