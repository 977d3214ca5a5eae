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

// The iteration engine: at each step a family of strings and weights is
// picked from the admissible class and the averaged string operator is
// applied.  Strategies decide the family per iteration; the engine records
// per-iteration certificates and handles stopping.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsap/strings.hpp"

namespace dsap {

struct Problem {
  int dimension = 0;
  std::vector<ConvexSet> sets;
  std::optional<Vec> feasible_point;  // known point of the intersection, when available
  std::string name;
  std::optional<std::uint64_t> seed;  // generator seed, for generated problems
};

/// Throws std::invalid_argument on dimension mismatches, invalid sets, or a
/// feasible_point that is not feasible to 1e-9.
void validate_problem(const Problem& p);

/// max_i d(x, C_i).
double proximity(const Problem& p, const Vec& x);

enum class StrategyKind {
  Sequential,       // one string (1, 2, ..., m), weight 1
  Simultaneous,     // m singleton strings, equal weights
  PartitionCyclic,  // contiguous blocks of a rotating index order
  RandomPartition,  // seeded shuffle, then an even partition
  FixedSAP,         // one constant amalgamator
  Custom,           // user-supplied sequence, cycled
};

class Strategy {
 public:
  static Strategy sequential(StarConstraints star);
  static Strategy simultaneous(StarConstraints star);
  static Strategy partition_cyclic(StarConstraints star, int block_count);
  static Strategy random_partition(StarConstraints star, std::uint64_t seed);
  static Strategy fixed_sap(StarConstraints star, Amalgamator A);
  static Strategy custom(StarConstraints star, std::vector<Amalgamator> sequence);

  /// The family used at iteration k (0-based).  Deterministic in (seed, k).
  Amalgamator at(std::uint64_t k) const;

  /// Largest number of strings this strategy ever emits.
  int max_string_count() const;

  StrategyKind kind() const { return kind_; }
  const StarConstraints& star() const { return star_; }

 private:
  Strategy(StrategyKind kind, StarConstraints star);

  StrategyKind kind_;
  StarConstraints star_;
  int blocks_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<Amalgamator> sequence_;
};

struct SolverConfig {
  double proximity_tol = 1e-6;  // stop when max_i d(x, C_i) <= this
  int max_iterations = 10000;
  double gamma = 1e-6;              // drop threshold tracked in the trace
  bool certificate_checks = true;   // enforce the per-iteration inequality
  bool parallel_strings = false;    // OpenMP over strings within an iteration
  std::size_t snapshot_budget = 1'000'000;  // max scalars of stored iterates
};

struct TraceRow {
  int k = 0;
  double proximity = 0.0;
  double phi_sum = 0.0;
  double step_norm = 0.0;
  std::optional<double> fejer_margin;       // needs a known feasible reference
  std::optional<double> dist_to_reference;  // ||z - x^k||
  std::optional<double> beta;               // perturbed runs only
  std::optional<double> v_norm;
  std::optional<double> cum_beta;
  std::optional<double> objective;  // superiorized runs only
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  std::vector<Vec> snapshots;  // x^1, x^2, ... while within the budget
  std::optional<int> first_drop_index;  // first k with phi_sum <= gamma
};

enum class SolveStatus { Converged, MaxIterations };

struct SolveResult {
  Vec x;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  IterationTrace trace;
};

SolveResult solve(const Problem& problem, const Strategy& strategy, const SolverConfig& config,
                  const Vec& x0);

/// Pre-step displacement hook for perturbed variants: maps (k, x^k) to the
/// point actually fed to the averaged operator, plus bookkeeping scalars.
struct StepPerturbation {
  Vec point;
  double beta = 0.0;
  double v_norm = 0.0;
};
using PerturbHook = std::function<StepPerturbation(int k, const Vec& x)>;
using ObjectiveHook = std::function<double(const Vec& x)>;

SolveResult solve_with_hooks(const Problem& problem, const Strategy& strategy,
                             const SolverConfig& config, const Vec& x0,
                             const PerturbHook& perturb, const ObjectiveHook& objective);

/// Smallest integer strictly greater than (gamma * delta)^{-1} (M + M0)^2:
/// the a-priori index by which some iteration must have a small merit sum.
std::int64_t k0_bound(double M, double M0, double delta_weights, double gamma);

/// gamma = (delta_reg / qbar)^2, the largest value with qbar * sqrt(gamma)
/// <= delta_reg.
double gamma_for_delta(int qbar, double delta_reg);

struct RegularityReport {
  int samples_requested = 0;
  int premise_met = 0;                 // samples with d(x, C_i) <= delta for all i
  double max_distance_estimate = 0.0;  // upper bound on d(x, C) over those samples
  bool exceeded_epsilon = false;
  std::string note;
};

/// Falsification probe for bounded regularity: samples near-feasible points
/// in B(0, M) and estimates their distance to the intersection.  Never a
/// proof; in finite dimension the condition always holds.
RegularityReport check_bounded_regularity(const Problem& problem, double M, double delta,
                                          double epsilon, int samples, std::uint64_t seed);

}  // namespace dsap
