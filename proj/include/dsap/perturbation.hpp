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

#pragma once

// Bounded perturbations of the iteration (summable step sizes beta_k and
// norm-bounded directions v^k, applied before the averaged operator) and the
// superiorization driver steering with negative normalized gradients.

#include <variant>

#include "dsap/solver.hpp"

namespace dsap {

struct ZeroBeta {};

/// beta_k = beta0 * ratio^k, ratio in (0, 1).
struct GeometricBeta {
  double beta0 = 1.0;
  double ratio = 0.5;
};

/// beta_k = beta0 / (k+1)^exponent, exponent > 1 (summable).
struct PowerLawBeta {
  double beta0 = 1.0;
  double exponent = 2.0;
};

using BetaRule = std::variant<ZeroBeta, GeometricBeta, PowerLawBeta>;

/// Throws std::invalid_argument on non-summable or malformed parameters
/// (ratio outside (0,1), exponent <= 1, beta0 < 0).
void validate_beta_rule(const BetaRule& rule);

double beta_at(const BetaRule& rule, int k);

/// A closed-form upper bound on the full series sum.
double beta_sum_bound(const BetaRule& rule);

struct SquaredNormObjective {};  // f(x) = ||x||^2

struct LinearObjective {  // f(x) = <c, x>
  Vec c;
};

struct DistanceToAnchorObjective {  // f(x) = ||x - a||^2
  Vec anchor;
};

using Objective = std::variant<SquaredNormObjective, LinearObjective, DistanceToAnchorObjective>;

double objective_value(const Objective& obj, const Vec& x);
Vec objective_gradient(const Objective& obj, const Vec& x);

struct FixedDirection {
  Vec v;
};

struct RandomUnitDirection {
  std::uint64_t seed = 0;
};

/// v^k = -g / max(1, ||g||) with g the objective gradient at x^k, so the
/// direction bound 1 is certified by construction.
struct SubgradientDirection {
  Objective objective;
};

using DirectionSource = std::variant<FixedDirection, RandomUnitDirection, SubgradientDirection>;

struct PerturbationSchedule {
  BetaRule beta;
  DirectionSource direction;
  double v_bound = 1.0;  // guaranteed ||v^k|| <= v_bound

  static PerturbationSchedule zero();
  static PerturbationSchedule make(BetaRule beta, DirectionSource direction);
};

bool is_zero_schedule(const PerturbationSchedule& s);

/// x^{k+1} = P_{Omega_k, w_k}(x^k + beta_k v^k).  With a zero beta rule this
/// takes exactly the unperturbed code path, so results and traces are
/// bitwise identical to solve().
SolveResult perturbed_solve(const Problem& problem, const Strategy& strategy,
                            const SolverConfig& config, const Vec& x0,
                            const PerturbationSchedule& schedule);

/// Feasibility seeking steered by negative normalized objective gradients;
/// the trace records the objective value at every iterate.
SolveResult superiorize(const Problem& problem, const Strategy& strategy,
                        const SolverConfig& config, const Vec& x0, const Objective& objective,
                        const BetaRule& beta_rule);

struct ResilienceVariant {
  std::string label;
  double final_proximity = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  Vec limit;
  double cum_beta = 0.0;
};

struct ResilienceReport {
  ResilienceVariant baseline;
  std::vector<ResilienceVariant> variants;
  std::vector<double> pairwise_limit_distances;  // baseline+variants, row-major upper triangle
  bool all_within_tolerance = true;
  // Experiments witness resilience on the tested instances; they do not
  // verify the universally quantified premise of the definition.
  std::string caveat =
      "resilience witnessed on this instance only; distinct limits are permitted";
};

ResilienceReport resilience_experiment(const Problem& problem, const Strategy& strategy,
                                       const SolverConfig& config, const Vec& x0,
                                       const std::vector<PerturbationSchedule>& schedules);

}  // namespace dsap
