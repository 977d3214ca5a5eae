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

// cfp: command-line front end for the string-averaging projection solver.
//
// Subcommands: solve, superiorize, generate, check.
// Exit codes: 0 success/converged, 2 iteration limit reached, 1 usage or
// input error.  Summaries go to stdout and are byte-deterministic; wall
// time and diagnostics go to stderr.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dsap/perturbation.hpp"
#include "dsap/problems_io.hpp"

namespace {

using namespace dsap;

Vec parse_csv_vec(const std::string& s, const char* what) {
  Vec v;
  std::istringstream is(s);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    std::size_t pos = 0;
    double val = 0.0;
    try {
      val = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error(std::string(what) + ": not a number: " + cell);
    }
    if (pos != cell.size())
      throw std::runtime_error(std::string(what) + ": trailing characters in: " + cell);
    v.push_back(val);
  }
  if (v.empty()) throw std::runtime_error(std::string(what) + ": empty vector");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string problem_path;
  std::string strategy_name = "sequential";
  int blocks = 2;
  std::uint64_t seed = 0;
  double delta = 0.0;  // 0 = default 0.9/max(m, strings)
  int qbar = 0;        // 0 = default m
  double tol = 1e-6;
  int max_iters = 10000;
  std::string x0_csv;
  std::string trace_path;
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--problem", o.problem_path, "problem file (.cfp.json)")->required();
  cmd->add_option("--strategy", o.strategy_name,
                  "sequential | simultaneous | partition-cyclic | random-partition")
      ->default_val("sequential");
  cmd->add_option("--blocks", o.blocks, "block count for partition-cyclic");
  cmd->add_option("--seed", o.seed, "seed for random-partition");
  cmd->add_option("--delta", o.delta, "weight lower bound, in (0, 1/m)");
  cmd->add_option("--qbar", o.qbar, "string length upper bound, >= m");
  cmd->add_option("--tol", o.tol, "proximity tolerance")->default_val(1e-6);
  cmd->add_option("--max-iters", o.max_iters, "iteration limit")->default_val(10000);
  cmd->add_option("--x0", o.x0_csv, "initial point as CSV (default: origin)");
  cmd->add_option("--trace", o.trace_path, "write per-iteration trace CSV here");
  cmd->add_flag("--parallel", o.parallel, "evaluate strings in parallel (OpenMP)");
}

StarConstraints make_star(const CommonOpts& o, int m, int max_strings) {
  StarConstraints star;
  star.m = m;
  star.qbar = o.qbar > 0 ? o.qbar : m;
  star.delta = o.delta > 0.0 ? o.delta : 0.9 / std::max(m, max_strings);
  return star;
}

Strategy make_strategy(const CommonOpts& o, int m) {
  if (o.strategy_name == "sequential")
    return Strategy::sequential(make_star(o, m, 1));
  if (o.strategy_name == "simultaneous")
    return Strategy::simultaneous(make_star(o, m, m));
  if (o.strategy_name == "partition-cyclic")
    return Strategy::partition_cyclic(make_star(o, m, o.blocks), o.blocks);
  if (o.strategy_name == "random-partition")
    return Strategy::random_partition(make_star(o, m, m), o.seed);
  throw std::runtime_error("unknown strategy: " + o.strategy_name);
}

SolverConfig make_config(const CommonOpts& o) {
  SolverConfig cfg;
  cfg.proximity_tol = o.tol;
  cfg.max_iterations = o.max_iters;
  cfg.parallel_strings = o.parallel;
  return cfg;
}

Vec make_x0(const CommonOpts& o, int n) {
  if (o.x0_csv.empty()) return Vec(static_cast<std::size_t>(n), 0.0);
  Vec x0 = parse_csv_vec(o.x0_csv, "--x0");
  if (static_cast<int>(x0.size()) != n)
    throw std::runtime_error("--x0 has dimension " + std::to_string(x0.size()) +
                             ", problem has dimension " + std::to_string(n));
  return x0;
}

int usage_checks(const CommonOpts& o) {
  if (o.max_iters < 1) {
    std::cerr << "error: --max-iters must be >= 1\n";
    return 1;
  }
  if (!(o.tol > 0.0)) {
    std::cerr << "error: --tol must be > 0\n";
    return 1;
  }
  return 0;
}

int report_run(const SolveResult& r, const Problem& p, const CommonOpts& o,
               std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  std::cout << "status: "
            << (r.status == SolveStatus::Converged ? "converged" : "max-iterations") << '\n'
            << "iterations: " << r.iterations << '\n'
            << "final proximity: " << fmt17(proximity(p, r.x)) << '\n';
  std::cerr << "wall time: " << elapsed.count() << " s\n";
  if (!o.trace_path.empty()) write_trace(r.trace, o.trace_path);
  return r.status == SolveStatus::Converged ? 0 : 2;
}

int cmd_solve(const CommonOpts& o) {
  if (int rc = usage_checks(o)) return rc;
  const Problem p = load_problem(o.problem_path);
  const Strategy strat = make_strategy(o, static_cast<int>(p.sets.size()));
  const auto start = std::chrono::steady_clock::now();
  const SolveResult r = solve(p, strat, make_config(o), make_x0(o, p.dimension));
  return report_run(r, p, o, start);
}

struct SuperiorizeOpts {
  std::string objective = "sqnorm";
  std::string anchor_csv;
  std::string c_csv;
  std::string beta_rule = "geometric";
  double beta0 = 1.0;
  double ratio = 0.5;
  double exponent = 2.0;
};

Objective make_objective(const SuperiorizeOpts& s, int n) {
  if (s.objective == "sqnorm") return SquaredNormObjective{};
  if (s.objective == "linear") {
    Vec c(static_cast<std::size_t>(n), 0.0);
    if (!s.c_csv.empty()) {
      c = parse_csv_vec(s.c_csv, "--c");
      if (static_cast<int>(c.size()) != n) throw std::runtime_error("--c: wrong dimension");
    }
    return LinearObjective{std::move(c)};
  }
  if (s.objective == "anchor") {
    if (s.anchor_csv.empty()) throw std::runtime_error("--anchor required for objective=anchor");
    Vec a = parse_csv_vec(s.anchor_csv, "--anchor");
    if (static_cast<int>(a.size()) != n) throw std::runtime_error("--anchor: wrong dimension");
    return DistanceToAnchorObjective{std::move(a)};
  }
  throw std::runtime_error("unknown objective: " + s.objective);
}

BetaRule make_beta_rule(const SuperiorizeOpts& s) {
  BetaRule rule;
  if (s.beta_rule == "zero")
    rule = ZeroBeta{};
  else if (s.beta_rule == "geometric")
    rule = GeometricBeta{s.beta0, s.ratio};
  else if (s.beta_rule == "powerlaw")
    rule = PowerLawBeta{s.beta0, s.exponent};
  else
    throw std::runtime_error("unknown beta rule: " + s.beta_rule);
  validate_beta_rule(rule);
  return rule;
}

int cmd_superiorize(const CommonOpts& o, const SuperiorizeOpts& s) {
  if (int rc = usage_checks(o)) return rc;
  const Problem p = load_problem(o.problem_path);
  const Strategy strat = make_strategy(o, static_cast<int>(p.sets.size()));
  const SolverConfig cfg = make_config(o);
  const Vec x0 = make_x0(o, p.dimension);
  const Objective obj = make_objective(s, p.dimension);
  const BetaRule rule = make_beta_rule(s);

  const auto start = std::chrono::steady_clock::now();
  const SolveResult base = solve(p, strat, cfg, x0);
  const SolveResult sup = superiorize(p, strat, cfg, x0, obj, rule);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

  std::cout << "baseline objective:     " << fmt17(objective_value(obj, base.x)) << '\n'
            << "superiorized objective: " << fmt17(objective_value(obj, sup.x)) << '\n'
            << "baseline iterations: " << base.iterations << '\n'
            << "superiorized iterations: " << sup.iterations << '\n'
            << "superiorized proximity: " << fmt17(proximity(p, sup.x)) << '\n';
  std::cerr << "wall time: " << elapsed.count() << " s\n";
  if (!o.trace_path.empty()) write_trace(sup.trace, o.trace_path);
  const bool ok =
      base.status == SolveStatus::Converged && sup.status == SolveStatus::Converged;
  return ok ? 0 : 2;
}

struct GenerateOpts {
  std::string kind = "mixed";
  int dim = 2;
  int sets = 3;
  std::uint64_t seed = 0;
  double margin = 0.1;
  std::string output;
};

int cmd_generate(const GenerateOpts& g) {
  GeneratorKind kind;
  if (g.kind == "halfspaces")
    kind = GeneratorKind::Halfspaces;
  else if (g.kind == "mixed")
    kind = GeneratorKind::Mixed;
  else {
    std::cerr << "error: --kind must be halfspaces or mixed\n";
    return 1;
  }
  const Problem p = generate_random(kind, g.dim, g.sets, g.seed, g.margin);
  save_problem(p, g.output);
  std::cout << "wrote " << g.output << " (n=" << g.dim << ", m=" << g.sets << ")\n";
  return 0;
}

struct CheckOpts {
  int iters = 100;
};

int cmd_check(const CommonOpts& o, const CheckOpts& c) {
  const Problem p = load_problem(o.problem_path);
  const int m = static_cast<int>(p.sets.size());

  const double delta = o.delta > 0.0 ? o.delta : 0.9 / m;
  const int qbar = o.qbar > 0 ? o.qbar : m;
  if (!(delta > 0.0) || !(delta < 1.0 / m)) {
    std::cerr << "error: delta must lie in (0, 1/m); got delta=" << delta << ", m=" << m << '\n';
    return 1;
  }
  if (qbar < m) {
    std::cerr << "error: qbar=" << qbar << " < m=" << m
              << ": string length m exceeds qbar for sequential strings\n";
    return 1;
  }

  CommonOpts oo = o;
  oo.delta = delta;
  oo.qbar = qbar;
  const Strategy strat = make_strategy(oo, m);
  for (int k = 0; k < c.iters; ++k) {
    const Amalgamator A = strat.at(static_cast<std::uint64_t>(k));
    const StarReport rep = validate_star(A, strat.star());
    if (!rep.ok) {
      std::cerr << "error: iteration " << k << " emits a star-invalid amalgamator:\n";
      for (const auto& v : rep.violations) std::cerr << "  " << v << '\n';
      return 1;
    }
  }
  std::cout << "ok: problem valid, strategy " << o.strategy_name << " star-valid for " << c.iters
            << " iterations (delta=" << fmt17(delta) << ", qbar=" << qbar << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"string-averaging projection solver for convex feasibility problems"};
  app.require_subcommand(1);

  CommonOpts solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "run the feasibility solver");
  add_common(solve_cmd, solve_opts);

  CommonOpts sup_opts;
  SuperiorizeOpts sup_extra;
  auto* sup_cmd = app.add_subcommand("superiorize", "feasibility with objective reduction");
  add_common(sup_cmd, sup_opts);
  sup_cmd->add_option("--objective", sup_extra.objective, "sqnorm | linear | anchor")
      ->default_val("sqnorm");
  sup_cmd->add_option("--anchor", sup_extra.anchor_csv, "anchor point as CSV");
  sup_cmd->add_option("--c", sup_extra.c_csv, "linear objective coefficients as CSV");
  sup_cmd->add_option("--beta-rule", sup_extra.beta_rule, "zero | geometric | powerlaw")
      ->default_val("geometric");
  sup_cmd->add_option("--beta0", sup_extra.beta0, "initial step size")->default_val(1.0);
  sup_cmd->add_option("--ratio", sup_extra.ratio, "geometric ratio in (0,1)")->default_val(0.5);
  sup_cmd->add_option("--exponent", sup_extra.exponent, "power-law exponent > 1")
      ->default_val(2.0);

  GenerateOpts gen_opts;
  auto* gen_cmd = app.add_subcommand("generate", "generate a random consistent problem");
  gen_cmd->add_option("--kind", gen_opts.kind, "halfspaces | mixed")->default_val("mixed");
  gen_cmd->add_option("--dim", gen_opts.dim, "dimension")->required();
  gen_cmd->add_option("--sets", gen_opts.sets, "number of sets")->required();
  gen_cmd->add_option("--seed", gen_opts.seed, "generator seed")->default_val(0);
  gen_cmd->add_option("--margin", gen_opts.margin, "feasibility margin")->default_val(0.1);
  gen_cmd->add_option("--output", gen_opts.output, "output path (.cfp.json)")->required();

  CommonOpts check_opts;
  CheckOpts check_extra;
  auto* check_cmd = app.add_subcommand("check", "validate a problem and strategy constraints");
  add_common(check_cmd, check_opts);
  check_cmd->add_option("--iters", check_extra.iters, "dry-run iterations")->default_val(100);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_opts);
    if (sup_cmd->parsed()) return cmd_superiorize(sup_opts, sup_extra);
    if (gen_cmd->parsed()) return cmd_generate(gen_opts);
    if (check_cmd->parsed()) return cmd_check(check_opts, check_extra);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
