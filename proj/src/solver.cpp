/*
    Copyright (c) 2026 the dsap-cfp authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include "dsap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dsap/rng.hpp"

namespace dsap {

void validate_problem(const Problem& p) {
  if (p.dimension < 1) throw std::invalid_argument("problem: dimension must be >= 1");
  if (p.sets.empty()) throw std::invalid_argument("problem: at least one set required");
  for (std::size_t i = 0; i < p.sets.size(); ++i) {
    validate_set(p.sets[i]);
    if (set_dimension(p.sets[i]) != static_cast<std::size_t>(p.dimension))
      throw std::invalid_argument("problem: set " + std::to_string(i) +
                                  " has dimension " + std::to_string(set_dimension(p.sets[i])) +
                                  ", expected " + std::to_string(p.dimension));
  }
  if (p.feasible_point) {
    const Vec& z = *p.feasible_point;
    require_finite(z, "feasible point");
    require_dim(z, static_cast<std::size_t>(p.dimension), "feasible point");
    const double tol = 1e-9 * (1.0 + norm(z));
    for (std::size_t i = 0; i < p.sets.size(); ++i)
      if (distance(p.sets[i], z) > tol)
        throw std::invalid_argument("problem: feasible_point violates set " + std::to_string(i));
  }
}

double proximity(const Problem& p, const Vec& x) {
  double worst = 0.0;
  for (const auto& s : p.sets) worst = std::max(worst, distance(s, x));
  return worst;
}

// ---------------------------------------------------------------------------
// Strategy

Strategy::Strategy(StrategyKind kind, StarConstraints star) : kind_(kind), star_(star) {
  validate_star_constraints(star_);
}

Strategy Strategy::sequential(StarConstraints star) {
  return Strategy(StrategyKind::Sequential, star);
}

Strategy Strategy::simultaneous(StarConstraints star) {
  return Strategy(StrategyKind::Simultaneous, star);
}

Strategy Strategy::partition_cyclic(StarConstraints star, int block_count) {
  Strategy s(StrategyKind::PartitionCyclic, star);
  if (block_count < 1 || block_count > star.m)
    throw std::invalid_argument("partition_cyclic: block count must lie in [1, m]");
  s.blocks_ = block_count;
  return s;
}

Strategy Strategy::random_partition(StarConstraints star, std::uint64_t seed) {
  Strategy s(StrategyKind::RandomPartition, star);
  s.seed_ = seed;
  return s;
}

Strategy Strategy::fixed_sap(StarConstraints star, Amalgamator A) {
  Strategy s(StrategyKind::FixedSAP, star);
  const auto rep = validate_star(A, star);
  if (!rep.ok) {
    std::string msg = "fixed_sap: star-invalid amalgamator:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  s.sequence_.push_back(std::move(A));
  return s;
}

Strategy Strategy::custom(StarConstraints star, std::vector<Amalgamator> sequence) {
  Strategy s(StrategyKind::Custom, star);
  if (sequence.empty()) throw std::invalid_argument("custom strategy: empty sequence");
  s.sequence_ = std::move(sequence);
  return s;
}

namespace {

// Splits `order` into `blocks` contiguous strings of near-equal length and
// returns the equally weighted amalgamator.
Amalgamator partition_amalgamator(const std::vector<int>& order, int blocks) {
  const int m = static_cast<int>(order.size());
  std::vector<IndexVector> strings;
  strings.reserve(static_cast<std::size_t>(blocks));
  const int base = m / blocks;
  const int rem = m % blocks;
  int pos = 0;
  for (int b = 0; b < blocks; ++b) {
    const int len = base + (b < rem ? 1 : 0);
    strings.emplace_back(order.begin() + pos, order.begin() + pos + len);
    pos += len;
  }
  std::vector<double> weights(static_cast<std::size_t>(blocks), 1.0 / blocks);
  return make_amalgamator(std::move(strings), std::move(weights));
}

}  // namespace

Amalgamator Strategy::at(std::uint64_t k) const {
  const int m = star_.m;
  switch (kind_) {
    case StrategyKind::Sequential: {
      IndexVector t(static_cast<std::size_t>(m));
      std::iota(t.begin(), t.end(), 1);
      return make_amalgamator({t}, {1.0});
    }
    case StrategyKind::Simultaneous: {
      std::vector<IndexVector> strings;
      strings.reserve(static_cast<std::size_t>(m));
      for (int i = 1; i <= m; ++i) strings.push_back({i});
      return make_amalgamator(std::move(strings),
                              std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
    }
    case StrategyKind::PartitionCyclic: {
      std::vector<int> order(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j)
        order[static_cast<std::size_t>(j)] =
            static_cast<int>((static_cast<std::uint64_t>(j) + k) % static_cast<std::uint64_t>(m)) +
            1;
      return partition_amalgamator(order, blocks_);
    }
    case StrategyKind::RandomPartition: {
      Rng g(mix64(seed_, k));
      std::vector<int> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), 1);
      shuffle(g, order);
      // Block count stays inside the admissible class: weights 1/B >= delta
      // and block lengths <= qbar hold for every B in [bmin, bmax].
      const int bmin = std::max(1, (m + star_.qbar - 1) / star_.qbar);
      const int bmax =
          std::max(bmin, std::min(m, static_cast<int>(std::floor(1.0 / star_.delta))));
      const int blocks = bmin + static_cast<int>(uniform_index(
                                    g, static_cast<std::uint64_t>(bmax - bmin + 1)));
      return partition_amalgamator(order, blocks);
    }
    case StrategyKind::FixedSAP:
      return sequence_.front();
    case StrategyKind::Custom:
      return sequence_[static_cast<std::size_t>(k % sequence_.size())];
  }
  throw std::logic_error("unreachable strategy kind");
}

int Strategy::max_string_count() const {
  switch (kind_) {
    case StrategyKind::Sequential:
      return 1;
    case StrategyKind::Simultaneous:
      return star_.m;
    case StrategyKind::PartitionCyclic:
      return blocks_;
    case StrategyKind::RandomPartition:
      return star_.m;
    case StrategyKind::FixedSAP:
    case StrategyKind::Custom: {
      std::size_t worst = 1;
      for (const auto& a : sequence_) worst = std::max(worst, a.strings.size());
      return static_cast<int>(worst);
    }
  }
  throw std::logic_error("unreachable strategy kind");
}

// ---------------------------------------------------------------------------
// Engine

SolveResult solve(const Problem& problem, const Strategy& strategy, const SolverConfig& config,
                  const Vec& x0) {
  return solve_with_hooks(problem, strategy, config, x0, nullptr, nullptr);
}

SolveResult solve_with_hooks(const Problem& problem, const Strategy& strategy,
                             const SolverConfig& config, const Vec& x0,
                             const PerturbHook& perturb, const ObjectiveHook& objective) {
  validate_problem(problem);
  validate_star_constraints(strategy.star());
  if (strategy.star().m != static_cast<int>(problem.sets.size()))
    throw std::invalid_argument("strategy constraints built for m=" +
                                std::to_string(strategy.star().m) + ", problem has m=" +
                                std::to_string(problem.sets.size()));
  require_finite(x0, "initial point");
  require_dim(x0, static_cast<std::size_t>(problem.dimension), "initial point");
  if (!(config.proximity_tol > 0.0))
    throw std::invalid_argument("config: proximity_tol must be > 0");
  if (config.max_iterations < 1)
    throw std::invalid_argument("config: max_iterations must be >= 1");
  if (!(config.gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");

  const double delta = strategy.star().delta;
  const Vec* ref = problem.feasible_point ? &*problem.feasible_point : nullptr;
  const bool keep_snapshots =
      static_cast<std::size_t>(problem.dimension) *
          static_cast<std::size_t>(config.max_iterations) <=
      config.snapshot_budget;
  // The Fejér inequality is only guaranteed for the unperturbed recursion.
  const bool enforce_certificates = config.certificate_checks && ref && !perturb;
  const double cert_scale = ref ? 1.0 + dist_sq(*ref, x0) : 0.0;

  SolveResult result;
  result.x = x0;

  if (proximity(problem, x0) <= config.proximity_tol) {
    result.status = SolveStatus::Converged;
    result.iterations = 0;
    return result;
  }

  Vec x = x0;
  double cum_beta = 0.0;
  for (int k = 1; k <= config.max_iterations; ++k) {
    StepPerturbation sp;
    if (perturb)
      sp = perturb(k - 1, x);
    else
      sp.point = x;

    const Amalgamator A = strategy.at(static_cast<std::uint64_t>(k - 1));
    const StarReport rep = validate_star(A, strategy.star());
    if (!rep.ok) {
      std::ostringstream os;
      os << "iteration " << k << ": strategy emitted a star-invalid amalgamator:";
      for (const auto& v : rep.violations) os << ' ' << v << ';';
      throw std::runtime_error(os.str());
    }

    const AmalgamatorResult step =
        apply_amalgamator(problem.sets, A, sp.point, config.parallel_strings);

    TraceRow row;
    row.k = k;
    row.phi_sum = step.phi_sum;
    row.step_norm = dist(step.next, x);
    row.proximity = proximity(problem, step.next);
    if (ref) {
      row.dist_to_reference = dist(*ref, step.next);
      row.fejer_margin =
          dist_sq(*ref, x) - dist_sq(*ref, step.next) - delta * step.phi_sum;
      if (enforce_certificates && *row.fejer_margin < -1e-9 * cert_scale) {
        std::ostringstream os;
        os << "iteration " << k << ": Fejer certificate violated, margin " << *row.fejer_margin;
        throw std::runtime_error(os.str());
      }
    }
    if (perturb) {
      row.beta = sp.beta;
      row.v_norm = sp.v_norm;
      cum_beta += sp.beta;
      row.cum_beta = cum_beta;
    }
    if (objective) row.objective = objective(step.next);

    if (!result.trace.first_drop_index && step.phi_sum <= config.gamma)
      result.trace.first_drop_index = k;

    x = step.next;
    if (keep_snapshots) result.trace.snapshots.push_back(x);
    result.trace.rows.push_back(std::move(row));
    result.iterations = k;

    if (result.trace.rows.back().proximity <= config.proximity_tol) {
      result.x = x;
      result.status = SolveStatus::Converged;
      // A run can stop before the merit sum was ever observed below gamma;
      // probe the next family at the converged point, where the merit is
      // essentially zero, so the drop index stays meaningful.
      if (!result.trace.first_drop_index) {
        const AmalgamatorResult probe = apply_amalgamator(
            problem.sets, strategy.at(static_cast<std::uint64_t>(k)), x, config.parallel_strings);
        if (probe.phi_sum <= config.gamma) result.trace.first_drop_index = k + 1;
      }
      return result;
    }
  }
  result.x = x;
  result.status = SolveStatus::MaxIterations;
  return result;
}

// ---------------------------------------------------------------------------
// Theorem-derived diagnostics

std::int64_t k0_bound(double M, double M0, double delta_weights, double gamma) {
  for (double v : {M, M0, delta_weights, gamma})
    if (!std::isfinite(v) || v <= 0.0)
      throw std::invalid_argument("k0_bound: all arguments must be finite and > 0");
  double t = (M + M0) * (M + M0) / (gamma * delta_weights);
  // Snap values that are an integer up to rounding error, so the "strictly
  // greater" rule is applied to the intended quotient.
  const double r = std::round(t);
  if (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(r))) t = r;
  if (t >= 9.0e18) throw std::overflow_error("k0_bound: bound exceeds int64 range");
  return static_cast<std::int64_t>(std::floor(t)) + 1;
}

double gamma_for_delta(int qbar, double delta_reg) {
  if (qbar < 1) throw std::invalid_argument("gamma_for_delta: qbar must be >= 1");
  if (!std::isfinite(delta_reg) || delta_reg <= 0.0)
    throw std::invalid_argument("gamma_for_delta: delta must be finite and > 0");
  double g = (delta_reg / qbar) * (delta_reg / qbar);
  while (qbar * std::sqrt(g) > delta_reg) g = std::nextafter(g, 0.0);
  return g;
}

RegularityReport check_bounded_regularity(const Problem& problem, double M, double delta,
                                          double epsilon, int samples, std::uint64_t seed) {
  validate_problem(problem);
  if (samples < 1) throw std::invalid_argument("check_bounded_regularity: samples must be >= 1");
  RegularityReport rep;
  rep.samples_requested = samples;

  const int m = static_cast<int>(problem.sets.size());
  const auto n = static_cast<std::size_t>(problem.dimension);
  Rng g(mix64(seed, 0x7265676cULL));

  const StarConstraints star{m, 0.9 / m, m};
  const Strategy seq = Strategy::sequential(star);
  SolverConfig refine_cfg;
  refine_cfg.proximity_tol = std::min(delta * 1e-3, 1e-10);
  refine_cfg.max_iterations = 20000;
  refine_cfg.certificate_checks = false;
  refine_cfg.snapshot_budget = 0;

  for (int s = 0; s < samples; ++s) {
    // Uniform in B(0, M).
    Vec x = random_unit(g, n);
    const double r = M * std::pow(uniform01(g), 1.0 / static_cast<double>(n));
    for (auto& c : x) c *= r;

    // Pull the sample toward near-feasibility by cyclic projection sweeps;
    // points that leave B(0, M) or never meet the premise are skipped.
    for (int sweep = 0; sweep < 2000 && proximity(problem, x) > delta; ++sweep)
      for (const auto& set : problem.sets) x = project(set, x);
    if (proximity(problem, x) > delta || norm(x) > M) continue;
    ++rep.premise_met;

    // d(x, C) <= ||x - limit|| + residual, an honest upper bound.
    const SolveResult run = solve(problem, seq, refine_cfg, x);
    const double est = dist(x, run.x) + proximity(problem, run.x);
    rep.max_distance_estimate = std::max(rep.max_distance_estimate, est);
  }
  rep.exceeded_epsilon = rep.max_distance_estimate > epsilon;
  if (rep.premise_met == 0) rep.note = "premise never met";
  return rep;
}

}  // namespace dsap
