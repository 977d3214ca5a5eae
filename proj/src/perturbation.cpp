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

#include "dsap/perturbation.hpp"

#include <cmath>
#include <memory>

#include "dsap/rng.hpp"

namespace dsap {

void validate_beta_rule(const BetaRule& rule) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, GeometricBeta>) {
          if (!std::isfinite(r.beta0) || r.beta0 < 0.0)
            throw std::invalid_argument("beta rule: beta0 must be finite and >= 0");
          if (!(r.ratio > 0.0) || !(r.ratio < 1.0))
            throw std::invalid_argument("beta rule: geometric ratio must lie in (0, 1)");
        } else if constexpr (std::is_same_v<T, PowerLawBeta>) {
          if (!std::isfinite(r.beta0) || r.beta0 < 0.0)
            throw std::invalid_argument("beta rule: beta0 must be finite and >= 0");
          if (!std::isfinite(r.exponent) || r.exponent <= 1.0)
            throw std::invalid_argument(
                "beta rule: power-law exponent must be > 1 (series must be summable)");
        }
      },
      rule);
}

double beta_at(const BetaRule& rule, int k) {
  if (k < 0) throw std::invalid_argument("beta_at: k must be >= 0");
  return std::visit(
      [k](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ZeroBeta>)
          return 0.0;
        else if constexpr (std::is_same_v<T, GeometricBeta>)
          return r.beta0 * std::pow(r.ratio, k);
        else
          return r.beta0 / std::pow(static_cast<double>(k) + 1.0, r.exponent);
      },
      rule);
}

double beta_sum_bound(const BetaRule& rule) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ZeroBeta>)
          return 0.0;
        else if constexpr (std::is_same_v<T, GeometricBeta>)
          return r.beta0 / (1.0 - r.ratio);
        else
          // sum 1/(k+1)^p <= 1 + integral_1^inf x^{-p} dx
          return r.beta0 * (1.0 + 1.0 / (r.exponent - 1.0));
      },
      rule);
}

double objective_value(const Objective& obj, const Vec& x) {
  return std::visit(
      [&x](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SquaredNormObjective>)
          return norm_sq(x);
        else if constexpr (std::is_same_v<T, LinearObjective>) {
          require_dim(x, o.c.size(), "linear objective");
          return dot(o.c, x);
        } else {
          require_dim(x, o.anchor.size(), "anchor objective");
          return dist_sq(x, o.anchor);
        }
      },
      obj);
}

Vec objective_gradient(const Objective& obj, const Vec& x) {
  return std::visit(
      [&x](const auto& o) -> Vec {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SquaredNormObjective>)
          return scaled(2.0, x);
        else if constexpr (std::is_same_v<T, LinearObjective>) {
          require_dim(x, o.c.size(), "linear objective");
          return o.c;
        } else {
          require_dim(x, o.anchor.size(), "anchor objective");
          return scaled(2.0, sub(x, o.anchor));
        }
      },
      obj);
}

PerturbationSchedule PerturbationSchedule::zero() {
  return PerturbationSchedule{ZeroBeta{}, FixedDirection{Vec{}}, 0.0};
}

PerturbationSchedule PerturbationSchedule::make(BetaRule beta, DirectionSource direction) {
  validate_beta_rule(beta);
  double bound = 1.0;
  if (const auto* f = std::get_if<FixedDirection>(&direction)) {
    require_finite(f->v, "fixed perturbation direction");
    bound = norm(f->v);
  }
  return PerturbationSchedule{std::move(beta), std::move(direction), bound};
}

bool is_zero_schedule(const PerturbationSchedule& s) {
  return std::holds_alternative<ZeroBeta>(s.beta);
}

namespace {

// Owns the seeded generator state of one run; never shared between runs.
class DirectionState {
 public:
  explicit DirectionState(const DirectionSource& src) : src_(src) {
    if (const auto* r = std::get_if<RandomUnitDirection>(&src_)) rng_ = Rng(mix64(r->seed));
  }

  Vec next(const Vec& x) {
    if (const auto* f = std::get_if<FixedDirection>(&src_)) {
      require_dim(x, f->v.size(), "fixed perturbation direction");
      return f->v;
    }
    if (std::holds_alternative<RandomUnitDirection>(src_)) return random_unit(rng_, x.size());
    const auto& s = std::get<SubgradientDirection>(src_);
    Vec g = objective_gradient(s.objective, x);
    if (!all_finite(g))
      throw std::runtime_error("perturbation direction: gradient is not finite");
    const double scale = std::max(1.0, norm(g));
    Vec v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = -g[i] / scale;
    return v;
  }

 private:
  DirectionSource src_;
  Rng rng_;
};

}  // namespace

SolveResult perturbed_solve(const Problem& problem, const Strategy& strategy,
                            const SolverConfig& config, const Vec& x0,
                            const PerturbationSchedule& schedule) {
  validate_beta_rule(schedule.beta);
  if (is_zero_schedule(schedule))
    return solve(problem, strategy, config, x0);  // identical code path, identical bits

  auto state = std::make_shared<DirectionState>(schedule.direction);
  const BetaRule beta = schedule.beta;
  const double v_bound = schedule.v_bound;
  PerturbHook hook = [state, beta, v_bound](int k, const Vec& x) {
    StepPerturbation sp;
    sp.beta = beta_at(beta, k);
    if (sp.beta == 0.0) {
      sp.point = x;
      return sp;
    }
    const Vec v = state->next(x);
    sp.v_norm = norm(v);
    if (sp.v_norm > v_bound + 1e-12)
      throw std::runtime_error("perturbation direction exceeds its declared bound");
    sp.point = add_scaled(x, sp.beta, v);
    return sp;
  };
  return solve_with_hooks(problem, strategy, config, x0, hook, nullptr);
}

SolveResult superiorize(const Problem& problem, const Strategy& strategy,
                        const SolverConfig& config, const Vec& x0, const Objective& objective,
                        const BetaRule& beta_rule) {
  validate_beta_rule(beta_rule);
  auto state = std::make_shared<DirectionState>(DirectionSource{SubgradientDirection{objective}});
  PerturbHook hook = [state, beta_rule](int k, const Vec& x) {
    StepPerturbation sp;
    sp.beta = beta_at(beta_rule, k);
    if (sp.beta == 0.0) {
      sp.point = x;
      return sp;
    }
    const Vec v = state->next(x);
    sp.v_norm = norm(v);
    sp.point = add_scaled(x, sp.beta, v);
    return sp;
  };
  ObjectiveHook obj_hook = [&objective](const Vec& x) { return objective_value(objective, x); };
  return solve_with_hooks(problem, strategy, config, x0, hook, obj_hook);
}

ResilienceReport resilience_experiment(const Problem& problem, const Strategy& strategy,
                                       const SolverConfig& config, const Vec& x0,
                                       const std::vector<PerturbationSchedule>& schedules) {
  ResilienceReport rep;

  auto summarize = [&](const SolveResult& r, std::string label) {
    ResilienceVariant v;
    v.label = std::move(label);
    v.final_proximity = proximity(problem, r.x);
    v.iterations = r.iterations;
    v.status = r.status;
    v.limit = r.x;
    if (!r.trace.rows.empty() && r.trace.rows.back().cum_beta)
      v.cum_beta = *r.trace.rows.back().cum_beta;
    if (v.final_proximity > config.proximity_tol) rep.all_within_tolerance = false;
    return v;
  };

  rep.baseline = summarize(solve(problem, strategy, config, x0), "baseline");
  for (std::size_t i = 0; i < schedules.size(); ++i)
    rep.variants.push_back(summarize(perturbed_solve(problem, strategy, config, x0, schedules[i]),
                                     "schedule-" + std::to_string(i)));

  std::vector<const Vec*> limits;
  limits.push_back(&rep.baseline.limit);
  for (const auto& v : rep.variants) limits.push_back(&v.limit);
  for (std::size_t i = 0; i < limits.size(); ++i)
    for (std::size_t j = i + 1; j < limits.size(); ++j)
      rep.pairwise_limit_distances.push_back(dist(*limits[i], *limits[j]));
  return rep;
}

}  // namespace dsap
