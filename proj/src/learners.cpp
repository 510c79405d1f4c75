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

#include "nfl/learners.hpp"

#include <charconv>

#include "nfl/errors.hpp"

namespace nfl {

namespace {

void require_binary(const FiniteDomain& domain, std::string_view who) {
  if (!domain.is_binary()) {
    throw InvalidArgumentError(std::string(who) + " requires |Y| = 2, got |Y| = " +
                               std::to_string(domain.y_size()));
  }
}

// Memorize d on d_X; predict `ots_label` everywhere else.
StochasticHypothesis memorize_then(const FiniteDomain& domain, const Dataset& d,
                                   std::size_t ots_label) {
  std::vector<std::size_t> outputs(domain.x_size(), ots_label);
  for (const auto& p : d.pairs()) {
    if (p.x >= domain.x_size() || p.y >= domain.y_size()) {
      throw InvalidArgumentError("learner: training pair outside the domain");
    }
    outputs[p.x] = p.y;
  }
  return StochasticHypothesis::deterministic(domain, outputs);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::size_t majority_label(const Dataset& d) {
  std::size_t ones = 0;
  for (const auto& p : d.pairs()) ones += (p.y == 1);
  return 2 * ones >= d.size() ? 1 : 0;
}

Learner majority_learner() {
  return Learner("majority", [](const FiniteDomain& domain, const Dataset& d) {
    require_binary(domain, "majority");
    return memorize_then(domain, d, majority_label(d));
  });
}

Learner anti_majority_learner() {
  return Learner("anti-majority", [](const FiniteDomain& domain, const Dataset& d) {
    require_binary(domain, "anti-majority");
    return memorize_then(domain, d, 1 - majority_label(d));
  });
}

Learner constant_learner(StochasticHypothesis h_star) {
  return Learner("constant-hypothesis",
                 [h = std::move(h_star)](const FiniteDomain& domain, const Dataset&) {
                   if (!(domain == h.domain())) {
                     throw InvalidArgumentError("constant learner: domain mismatch");
                   }
                   return h;
                 });
}

Learner constant_label_learner(std::size_t label) {
  return Learner("constant:" + std::to_string(label),
                 [label](const FiniteDomain& domain, const Dataset&) {
                   if (label >= domain.y_size()) {
                     throw InvalidArgumentError("constant learner: label outside Y");
                   }
                   return StochasticHypothesis::deterministic(
                       domain, std::vector<std::size_t>(domain.x_size(), label));
                 });
}

Learner random_guess_learner() {
  return Learner("random", [](const FiniteDomain& domain, const Dataset&) {
    require_binary(domain, "random");
    return StochasticHypothesis::uniform(domain);
  });
}

Rational loo_cv_error(const Learner& algo, const FiniteDomain& domain, const Dataset& d,
                      const LossFunction& loss) {
  if (d.size() < 2) throw InvalidArgumentError("loo_cv_error: needs at least two pairs");
  Rational total;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto h = algo.train(domain, d.without(i));
    const auto& held_out = d.pairs()[i];
    const auto dist = h.distribution(held_out.x);
    for (std::size_t y = 0; y < dist.size(); ++y) {
      if (!dist[y].is_zero()) total += dist[y] * loss(y, held_out.y);
    }
  }
  return total / Rational(static_cast<std::int64_t>(d.size()));
}

std::size_t cv_select(const std::vector<Learner>& algos, CvSelectionMode mode,
                      const FiniteDomain& domain, const Dataset& d, const LossFunction& loss) {
  if (algos.empty()) throw InvalidArgumentError("cv_select: no candidate algorithms");
  std::size_t best = 0;
  Rational best_error = loo_cv_error(algos[0], domain, d, loss);
  for (std::size_t i = 1; i < algos.size(); ++i) {
    const Rational e = loo_cv_error(algos[i], domain, d, loss);
    const bool better = mode == CvSelectionMode::kMin ? e < best_error : e > best_error;
    if (better) {
      best = i;
      best_error = e;
    }
  }
  return best;
}

Learner cv_meta(std::vector<Learner> algos, CvSelectionMode mode,
                std::optional<LossFunction> cv_loss) {
  if (algos.empty()) throw InvalidArgumentError("cv_meta: no candidate algorithms");
  std::string name = mode == CvSelectionMode::kMin ? "cv:min:" : "cv:max:";
  for (std::size_t i = 0; i < algos.size(); ++i) {
    if (i) name += ",";
    name += algos[i].name();
  }
  return Learner(std::move(name), [algos = std::move(algos), mode, cv_loss = std::move(cv_loss)](
                                      const FiniteDomain& domain, const Dataset& d) {
    const LossFunction loss = cv_loss ? *cv_loss : zero_one_loss(domain);
    return algos[cv_select(algos, mode, domain, d, loss)].train(domain, d);
  });
}

Learner make_learner(std::string_view name) {
  if (name == "majority") return majority_learner();
  if (name == "anti-majority") return anti_majority_learner();
  if (name == "random") return random_guess_learner();
  if (name.starts_with("constant:")) {
    const auto digits = name.substr(9);
    std::size_t label = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), label);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw InvalidArgumentError("unknown learner '" + std::string(name) +
                                 "': constant needs a label, e.g. constant:0");
    }
    return constant_label_learner(label);
  }
  if (name.starts_with("cv:")) {
    // Base names may contain ':' themselves (constant:1).
    const auto mode = name.substr(3, 4);
    const auto bases = name.size() > 7 ? name.substr(7) : std::string_view();
    if ((mode != "min:" && mode != "max:") || bases.empty()) {
      throw InvalidArgumentError("unknown learner '" + std::string(name) +
                                 "': expected cv:min:<a>,<b> or cv:max:<a>,<b>");
    }
    std::vector<Learner> algos;
    for (auto base : split(bases, ',')) algos.push_back(make_learner(base));
    return cv_meta(std::move(algos),
                   mode == "min:" ? CvSelectionMode::kMin : CvSelectionMode::kMax);
  }
  throw InvalidArgumentError("unknown learner '" + std::string(name) + "'");
}

std::vector<std::string> learner_registry_examples() {
  return {"majority", "anti-majority", "random", "constant:0", "constant:1",
          "cv:min:majority,anti-majority", "cv:max:majority,anti-majority"};
}

}  // namespace nfl
