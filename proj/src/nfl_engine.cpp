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

#include "nfl/nfl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfl/errors.hpp"
#include "nfl/parallel.hpp"
#include "nfl/rng.hpp"

namespace nfl {

namespace {

Rational ots_mass(const Dataset& d, const SamplingDistribution& pi) {
  Rational mass;
  for (std::size_t q = 0; q < pi.size(); ++q) {
    if (!d.contains_input(q)) mass += pi[q];
  }
  return mass;
}

std::string describe(const Dataset& d) {
  std::ostringstream os;
  os << "d_X=(";
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d.pairs()[i].x;
  os << ")";
  return os.str();
}

// True if d should be skipped; throws under the abort policy.
bool skip_empty_ots(const Dataset& d, const SamplingDistribution& pi, const EngineOptions& options) {
  if (!ots_mass(d, pi).is_zero()) return false;
  if (options.empty_ots == EmptyOtsPolicy::kAbort) {
    throw EmptyOtsError("training set " + describe(d) +
                        " leaves no off-training-set mass (set empty_ots to exclude)");
  }
  return true;
}

CostDistribution cost_for(const TargetFunction& f, const StochasticHypothesis& h, const Dataset& d,
                          const QueryWeighting& w, const LossFunction& loss,
                          CostSemantics semantics) {
  if (semantics == CostSemantics::kExpected) {
    return CostDistribution::delta(generic_cost(f, h, d, w, loss));
  }
  return cost_distribution_over_realizations(f, h, d, w, loss);
}

CostDistribution normalized(const CostDistribution& dist, const Rational& mass) {
  if (mass == Rational(1)) return dist;
  CostDistribution out;
  out.add_scaled(dist, Rational(1) / mass);
  return out;
}

void require_binary_odd(const FiniteDomain& domain, std::size_t m, std::string_view who) {
  if (!domain.is_binary()) throw InvalidArgumentError(std::string(who) + " requires |Y| = 2");
  if (m % 2 == 0) {
    throw InvalidArgumentError(std::string(who) + " requires odd m, got m = " + std::to_string(m));
  }
}

NflReport compare_distributions(std::string check, const std::vector<Learner>& learners,
                                std::vector<CostDistribution> distributions) {
  NflReport report;
  report.check = std::move(check);
  for (const auto& l : learners) report.learner_names.push_back(l.name());
  report.distributions = std::move(distributions);
  report.pass = true;
  for (std::size_t i = 1; i < report.distributions.size(); ++i) {
    if (auto diff = first_difference(report.distributions[0], report.distributions[i])) {
      report.pass = false;
      report.discrepancy = Discrepancy{0, i, *diff};
      break;
    }
  }
  return report;
}

}  // namespace

CostDistribution cost_distribution_given_f(const Learner& learner, const TargetFunction& f,
                                           std::size_t m, const SamplingDistribution& pi,
                                           const LossFunction& loss, bool ots,
                                           CostSemantics semantics,
                                           const EngineOptions& options) {
  const auto w = ots ? QueryWeighting::ots(pi) : QueryWeighting::data_blind(pi);
  CostDistribution out;
  Rational included;
  for (const auto& d : enumerate_training_sets(f, m, pi, options.replacement, options.budget)) {
    if (ots && skip_empty_ots(d, pi, options)) continue;
    const auto h = learner.train(f.domain(), d);
    out.add_scaled(cost_for(f, h, d, w, loss, semantics), d.weight());
    included += d.weight();
  }
  if (included.is_zero()) throw EmptyOtsError("every training set leaves no OTS mass");
  return normalized(out, included);
}

Rational expected_cost_given_d(const Learner& learner, const Prior& prior, const Dataset& d,
                               const SamplingDistribution& pi, const LossFunction& loss,
                               bool ots) {
  const auto posterior = posterior_over_functions(prior, d);
  const auto& domain = posterior.support().front().domain();
  const auto h = learner.train(domain, d);
  const auto w = ots ? QueryWeighting::ots(pi) : QueryWeighting::data_blind(pi);
  Rational total;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (posterior.weights()[i].is_zero()) continue;
    total += posterior.weights()[i] * generic_cost(posterior.support()[i], h, d, w, loss);
  }
  return total;
}

Rational prior_expected_cost(const Learner& learner, const Prior& prior, std::size_t m,
                             const SamplingDistribution& pi, const LossFunction& loss, bool ots,
                             const EngineOptions& options) {
  const auto per_f = parallel_map(prior.size(), options.workers, [&](std::size_t i) {
    return cost_distribution_given_f(learner, prior.support()[i], m, pi, loss, ots,
                                     CostSemantics::kExpected, options)
        .expectation();
  });
  Rational total;
  for (std::size_t i = 0; i < per_f.size(); ++i) total += prior.weights()[i] * per_f[i];
  return total;
}

Prior constant_functions_prior(const FiniteDomain& domain) {
  std::vector<TargetFunction> support;
  for (std::size_t y = 0; y < domain.y_size(); ++y) {
    support.push_back(TargetFunction::constant(domain, y));
  }
  return Prior::uniform_over(std::move(support));
}

NflReport nfl_f_average_check(const std::vector<Learner>& learners, const FiniteDomain& domain,
                              std::size_t m, const SamplingDistribution& pi,
                              const LossFunction& loss, bool force,
                              const EngineOptions& options) {
  if (learners.empty()) throw InvalidArgumentError("nfl_f_average_check: no learners");
  if (!force && !check_homogeneous(loss)) {
    throw InvalidArgumentError(
        "nfl_f_average_check: loss is not homogeneous; the theorem does not apply (use force)");
  }
  const auto functions = enumerate_functions(domain, options.budget);
  const Rational share(1, static_cast<std::int64_t>(functions.size()));

  auto per_f = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    std::vector<CostDistribution> row;
    row.reserve(learners.size());
    for (const auto& l : learners) {
      row.push_back(
          cost_distribution_given_f(l, f, m, pi, loss, true, CostSemantics::kRealized, options));
    }
    return row;
  });

  std::vector<CostDistribution> averaged(learners.size());
  for (const auto& row : per_f) {
    for (std::size_t l = 0; l < learners.size(); ++l) averaged[l].add_scaled(row[l], share);
  }
  return compare_distributions("nfl-f-average", learners, std::move(averaged));
}

NflReport nfl_uniform_prior_check(const std::vector<Learner>& learners,
                                  const FiniteDomain& domain, const Dataset& d,
                                  const SamplingDistribution& pi, const LossFunction& loss,
                                  bool force, const EngineOptions& options) {
  if (learners.empty()) throw InvalidArgumentError("nfl_uniform_prior_check: no learners");
  if (!force && !check_homogeneous(loss)) {
    throw InvalidArgumentError(
        "nfl_uniform_prior_check: loss is not homogeneous; the theorem does not apply");
  }
  if (ots_mass(d, pi).is_zero()) {
    throw EmptyOtsError("nfl_uniform_prior_check: " + describe(d) + " leaves no OTS mass");
  }
  const auto posterior = posterior_over_functions(Prior::uniform(domain, options.budget), d);
  const auto w = QueryWeighting::ots(pi);

  std::vector<CostDistribution> out;
  for (const auto& l : learners) {
    const auto h = l.train(domain, d);
    CostDistribution dist;
    for (std::size_t i = 0; i < posterior.size(); ++i) {
      dist.add_scaled(cost_distribution_over_realizations(posterior.support()[i], h, d, w, loss),
                      posterior.weights()[i]);
    }
    out.push_back(std::move(dist));
  }
  return compare_distributions("nfl-uniform-prior", learners, std::move(out));
}

PriorAverageReport prior_average_check(const std::vector<Learner>& learners,
                                       const FiniteDomain& domain, std::size_t m,
                                       const SamplingDistribution& pi, const LossFunction& loss,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const EngineOptions& options) {
  if (learners.empty()) throw InvalidArgumentError("prior_average_check: no learners");
  const auto functions = enumerate_functions(domain, options.budget);
  const std::size_t n_f = functions.size();

  // expected[f][l] = E(C_OTS | f, m) for learner l; linear in P(f).
  const auto expected = parallel_map(n_f, options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    std::vector<Rational> row;
    for (const auto& l : learners) {
      row.push_back(
          cost_distribution_given_f(l, f, m, pi, loss, true, CostSemantics::kExpected, options)
              .expectation());
    }
    return row;
  });

  PriorAverageReport report;
  report.n_samples = n_samples;
  const Rational share(1, static_cast<std::int64_t>(n_f));
  for (std::size_t l = 0; l < learners.size(); ++l) {
    PriorAverageEntry entry;
    entry.learner = learners[l].name();
    for (std::size_t i = 0; i < n_f; ++i) entry.exact_expected_cost += expected[i][l] * share;
    report.entries.push_back(std::move(entry));
  }
  report.exact_equal = std::all_of(report.entries.begin(), report.entries.end(), [&](const auto& e) {
    return e.exact_expected_cost == report.entries.front().exact_expected_cost;
  });

  if (n_samples == 0) return report;

  Rng seeds(seed);
  std::vector<std::vector<double>> samples(learners.size());
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto prior = sample_random_prior(domain, seeds.next(), options.budget);
    for (std::size_t l = 0; l < learners.size(); ++l) {
      Rational value;
      for (std::size_t i = 0; i < n_f; ++i) value += prior.weights()[i] * expected[i][l];
      samples[l].push_back(value.to_double());
    }
  }
  for (std::size_t l = 0; l < learners.size(); ++l) {
    const auto& v = samples[l];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    auto& e = report.entries[l];
    e.mc_mean = mean;
    e.mc_stddev = std::sqrt(var);
    e.mc_min = *std::min_element(v.begin(), v.end());
    e.mc_max = *std::max_element(v.begin(), v.end());
  }
  return report;
}

Rational ConditionalTable::total_mass() const {
  Rational total;
  for (const auto& r : rows) total += r.mass;
  return total;
}

bool ConditionalTable::rows_equal() const {
  return std::all_of(rows.begin(), rows.end(), [this](const ConditionalRow& r) {
    return r.expected_ots_cost == rows.front().expected_ots_cost;
  });
}

ConditionalTable ots_vs_empirical_table(const StochasticHypothesis& h_star,
                                        const FiniteDomain& domain, std::size_t m,
                                        const SamplingDistribution& pi, const LossFunction& loss,
                                        const EngineOptions& options) {
  if (!(h_star.domain() == domain)) {
    throw InvalidArgumentError("ots_vs_empirical_table: hypothesis domain mismatch");
  }
  const auto functions = enumerate_functions(domain, options.budget);
  struct Cell {
    Rational mass;
    Rational weighted_ots;
  };
  using Partial = std::pair<std::map<Rational, Cell>, Rational>;

  const auto per_f = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    Partial partial;
    for (const auto& d : enumerate_training_sets(f, m, pi, options.replacement, options.budget)) {
      if (skip_empty_ots(d, pi, options)) continue;
      const Rational c_hat = on_training_cost(f, h_star, d, pi, loss);
      const Rational c_ots = ots_cost(f, h_star, d, pi, loss);
      auto& cell = partial.first[c_hat];
      cell.mass += d.weight();
      cell.weighted_ots += d.weight() * c_ots;
      partial.second += d.weight();
    }
    return partial;
  });

  std::map<Rational, Cell> cells;
  Rational included;
  for (const auto& [partial_cells, partial_mass] : per_f) {
    for (const auto& [c, cell] : partial_cells) {
      cells[c].mass += cell.mass;
      cells[c].weighted_ots += cell.weighted_ots;
    }
    included += partial_mass;
  }
  if (included.is_zero()) throw EmptyOtsError("ots_vs_empirical_table: no OTS mass anywhere");

  ConditionalTable table;
  for (const auto& [c, cell] : cells) {
    table.rows.push_back({c, cell.weighted_ots / cell.mass, cell.mass / included});
  }
  return table;
}

LlnReport lln_convergence_experiment(const StochasticHypothesis& h_star, const TargetFunction& f,
                                     std::size_t m, const SamplingDistribution& pi,
                                     const LossFunction& loss, std::size_t n_samples,
                                     std::uint64_t seed) {
  const auto& domain = f.domain();
  if (m == 0) throw InvalidArgumentError("lln_convergence_experiment: m must be positive");
  if (domain.x_size() < 10 * m) {
    throw InvalidArgumentError("lln_convergence_experiment: requires |X| >= 10 m (|X| = " +
                               std::to_string(domain.x_size()) + ", m = " + std::to_string(m) +
                               ")");
  }
  if (n_samples < 2) throw InvalidArgumentError("lln_convergence_experiment: needs >= 2 samples");
  if (!(h_star.domain() == domain) || pi.size() != domain.x_size()) {
    throw InvalidArgumentError("lln_convergence_experiment: domain mismatch");
  }

  LlnReport report;
  report.n_samples = n_samples;
  std::vector<double> point_loss(domain.x_size());
  std::vector<double> weight(domain.x_size());
  std::vector<double> cumulative(domain.x_size());
  double running = 0.0;
  for (std::size_t x = 0; x < domain.x_size(); ++x) {
    Rational ell;
    for (std::size_t y = 0; y < domain.y_size(); ++y) ell += h_star.prob(x, y) * loss(y, f(x));
    report.data_blind_cost += pi[x] * ell;
    point_loss[x] = ell.to_double();
    weight[x] = pi[x].to_double();
    running += weight[x];
    cumulative[x] = running;
  }
  const bool uniform = pi.is_uniform();

  Rng rng(seed);
  auto draw = [&]() -> std::size_t {
    if (uniform) return static_cast<std::size_t>(rng.below(domain.x_size()));
    const double u = rng.unit() * running;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 domain.x_size() - 1);
  };

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t x = draw();
      num += weight[x] * point_loss[x];
      den += weight[x];
    }
    const double c = num / den;
    sum += c;
    sum_sq += c * c;
  }
  const double n = static_cast<double>(n_samples);
  report.mc_empirical_cost = sum / n;
  const double var = std::max(0.0, (sum_sq - n * report.mc_empirical_cost * report.mc_empirical_cost) /
                                       (n - 1.0));
  report.standard_error = std::sqrt(var / n);
  report.gap = std::fabs(report.mc_empirical_cost - report.data_blind_cost.to_double());
  report.within_three_standard_errors =
      report.gap == 0.0 || report.gap < 3.0 * report.standard_error;
  return report;
}

// -- JointCostDistribution ----------------------------------------------------

void JointCostDistribution::add(const Rational& a, const Rational& b,
                                const Rational& probability) {
  if (probability.is_zero()) return;
  atoms_[{a, b}] += probability;
}

Rational JointCostDistribution::total_mass() const {
  Rational total;
  for (const auto& [k, p] : atoms_) total += p;
  return total;
}

CostDistribution JointCostDistribution::marginal_first() const {
  CostDistribution out;
  for (const auto& [k, p] : atoms_) out.add(k.first, p);
  return out;
}

CostDistribution JointCostDistribution::marginal_second() const {
  CostDistribution out;
  for (const auto& [k, p] : atoms_) out.add(k.second, p);
  return out;
}

JointCostDistribution JointCostDistribution::transposed() const {
  JointCostDistribution out;
  for (const auto& [k, p] : atoms_) out.add(k.second, k.first, p);
  return out;
}

HeadToHeadReport joint_head_to_head(const Learner& a, const Learner& b,
                                    const FiniteDomain& domain, std::size_t m,
                                    const SamplingDistribution& pi, const LossFunction& loss,
                                    const EngineOptions& options) {
  const auto functions = enumerate_functions(domain, options.budget);
  const auto w = QueryWeighting::ots(pi);

  using Partial = std::pair<JointCostDistribution, Rational>;
  const auto per_f = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    Partial partial;
    for (const auto& d : enumerate_training_sets(f, m, pi, options.replacement, options.budget)) {
      if (skip_empty_ots(d, pi, options)) continue;
      const auto dist_a = cost_distribution_over_realizations(f, a.train(domain, d), d, w, loss);
      const auto dist_b = cost_distribution_over_realizations(f, b.train(domain, d), d, w, loss);
      for (const auto& [ca, pa] : dist_a.atoms()) {
        for (const auto& [cb, pb] : dist_b.atoms()) partial.first.add(ca, cb, d.weight() * pa * pb);
      }
      partial.second += d.weight();
    }
    return partial;
  });

  Rational included;
  JointCostDistribution unnormalized;
  for (const auto& [joint, mass] : per_f) {
    for (const auto& [k, p] : joint.atoms()) unnormalized.add(k.first, k.second, p);
    included += mass;
  }
  if (included.is_zero()) throw EmptyOtsError("joint_head_to_head: no OTS mass anywhere");

  HeadToHeadReport report;
  report.learner_a = a.name();
  report.learner_b = b.name();
  for (const auto& [k, p] : unnormalized.atoms()) report.joint.add(k.first, k.second, p / included);
  report.swapped = report.joint.transposed();
  report.swap_symmetric = report.joint == report.swapped;
  if (!report.swap_symmetric) {
    // Smallest atom whose mass changes under the interchange.
    std::map<CostPair, std::pair<Rational, Rational>> merged;
    for (const auto& [k, p] : report.joint.atoms()) merged[k].first = p;
    for (const auto& [k, p] : report.swapped.atoms()) merged[k].second = p;
    for (const auto& [k, pp] : merged) {
      if (pp.first != pp.second) {
        report.witness = JointAsymmetry{k.first, k.second, pp.first, pp.second};
        break;
      }
    }
  }
  return report;
}

Learner phi_learner() {
  return cv_meta({majority_learner(), anti_majority_learner()}, CvSelectionMode::kMin);
}

Learner anti_phi_learner() {
  return cv_meta({majority_learner(), anti_majority_learner()}, CvSelectionMode::kMax);
}

PriorWitness prior_witness_search(const FiniteDomain& domain, std::size_t m,
                                  const SamplingDistribution& pi, const LossFunction& loss,
                                  const EngineOptions& options) {
  require_binary_odd(domain, m, "prior_witness_search");
  const auto functions = enumerate_functions(domain, options.budget);
  const auto cv = phi_learner();
  const auto anti = anti_phi_learner();

  const auto costs = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    auto expected = [&](const Learner& l) {
      return cost_distribution_given_f(l, f, m, pi, loss, true, CostSemantics::kExpected, options)
          .expectation();
    };
    return std::make_pair(expected(anti), expected(cv));
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i].first < costs[best].first) best = i;
  }
  if (!(costs[best].first < Rational(1, 2))) {
    throw ConsistencyError(
        "prior_witness_search: no vertex prior gives anti-cross-validation an expected OTS cost "
        "below 1/2; this contradicts the f-average identity");
  }
  auto target = functions.at(best);
  return PriorWitness{Prior::delta(target), target, costs[best].first, costs[best].second};
}

PhiSumReport phi_sum_constant(const FiniteDomain& domain, std::size_t m,
                              const SamplingDistribution& pi, const EngineOptions& options) {
  require_binary_odd(domain, m, "phi_sum_constant");
  const auto functions = enumerate_functions(domain, options.budget);
  const auto loss = zero_one_loss(domain);
  const std::vector<Learner> algos = {majority_learner(), anti_majority_learner()};

  struct Partial {
    std::map<Rational, std::uint64_t> differing;
    std::map<Rational, std::string> example;  // one (f, d) per differing value
    std::map<Rational, std::uint64_t> agreeing;
  };
  const auto per_f = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    Partial partial;
    for (const auto& d : enumerate_training_sets(f, m, pi, options.replacement, options.budget)) {
      if (skip_empty_ots(d, pi, options)) continue;
      const auto lo = cv_select(algos, CvSelectionMode::kMin, domain, d, loss);
      const auto hi = cv_select(algos, CvSelectionMode::kMax, domain, d, loss);
      const Rational sum = ots_cost(f, algos[lo].train(domain, d), d, pi, loss) +
                           ots_cost(f, algos[hi].train(domain, d), d, pi, loss);
      if (lo != hi) {
        ++partial.differing[sum];
        partial.example.emplace(sum, "f=" + f.str() + " " + describe(d));
      } else {
        ++partial.agreeing[sum];
      }
    }
    return partial;
  });

  PhiSumReport report;
  std::map<Rational, std::uint64_t> differing;
  std::map<Rational, std::string> example;
  for (const auto& p : per_f) {
    for (const auto& [s, n] : p.differing) differing[s] += n;
    for (const auto& [s, e] : p.example) example.emplace(s, e);
    for (const auto& [s, n] : p.agreeing) report.sums_when_agreeing[s] += n;
  }
  for (const auto& [s, n] : differing) report.differing_pairs += n;
  for (const auto& [s, n] : report.sums_when_agreeing) report.agreeing_pairs += n;

  if (differing.size() != 1) {
    std::ostringstream os;
    os << "phi_sum_constant: sum over differing selections is not constant;";
    if (differing.empty()) os << " no (f, d) pair has differing selections";
    for (const auto& [s, n] : differing) {
      os << " value " << s << " on " << n << " pairs (e.g. " << example[s] << ");";
    }
    throw ConsistencyError(os.str());
  }
  report.constant = differing.begin()->first;
  return report;
}

Rational uniform_f_expected_cost_fixed_inputs(const Learner& learner, const FiniteDomain& domain,
                                              const std::vector<std::size_t>& inputs,
                                              const SamplingDistribution& pi,
                                              const LossFunction& loss,
                                              const EngineOptions& options) {
  if (inputs.empty()) throw InvalidArgumentError("fixed-input average: no training inputs");
  const auto functions = enumerate_functions(domain, options.budget);
  const auto per_f = parallel_map(functions.size(), options.workers, [&](std::size_t i) {
    const auto f = functions.at(i);
    std::vector<LabeledPoint> pairs;
    for (std::size_t x : inputs) pairs.push_back({x, f(x)});
    const Dataset d(std::move(pairs));
    return ots_cost(f, learner.train(domain, d), d, pi, loss);
  });
  Rational total;
  for (const auto& c : per_f) total += c;
  return total / Rational(static_cast<std::int64_t>(functions.size()));
}

}  // namespace nfl
