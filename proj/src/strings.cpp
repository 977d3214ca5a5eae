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

#include "dsap/strings.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace dsap {

void validate_star_constraints(const StarConstraints& sc) {
  if (sc.m < 1) throw std::invalid_argument("star constraints: m must be >= 1");
  if (!(sc.delta > 0.0) || !(sc.delta < 1.0 / sc.m))
    throw std::invalid_argument("star constraints: delta must lie in (0, 1/m)");
  if (sc.qbar < sc.m) throw std::invalid_argument("star constraints: qbar must be >= m");
}

std::string index_vector_to_string(const IndexVector& t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << ',';
    os << t[i];
  }
  os << ')';
  return os.str();
}

Amalgamator make_amalgamator(std::vector<IndexVector> strings, std::vector<double> weights) {
  if (strings.empty()) throw std::invalid_argument("amalgamator: empty string family");
  if (strings.size() != weights.size())
    throw std::invalid_argument("amalgamator: strings/weights size mismatch");
  for (const auto& t : strings)
    if (t.empty()) throw std::invalid_argument("amalgamator: empty index vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0.0)
      throw std::invalid_argument("amalgamator: weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("amalgamator: weights sum to " + std::to_string(sum) +
                                ", must be 1 within 1e-9");
  if (sum != 1.0)
    for (double& w : weights) w /= sum;
  return Amalgamator{std::move(strings), std::move(weights)};
}

void validate_amalgamator(const Amalgamator& A, int m) {
  if (A.strings.empty() || A.strings.size() != A.weights.size())
    throw std::invalid_argument("amalgamator: malformed string/weight lists");
  double sum = 0.0;
  for (double w : A.weights) {
    if (!std::isfinite(w) || w <= 0.0)
      throw std::invalid_argument("amalgamator: weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("amalgamator: weights must sum to 1");
  std::vector<bool> covered(static_cast<std::size_t>(m) + 1, false);
  for (const auto& t : A.strings) {
    if (t.empty()) throw std::invalid_argument("amalgamator: empty index vector");
    for (int i : t) {
      if (i < 1 || i > m)
        throw std::invalid_argument("amalgamator: index " + std::to_string(i) +
                                    " out of range [1, " + std::to_string(m) + "]");
      covered[static_cast<std::size_t>(i)] = true;
    }
  }
  for (int i = 1; i <= m; ++i)
    if (!covered[static_cast<std::size_t>(i)])
      throw std::invalid_argument("amalgamator: not fit, index " + std::to_string(i) +
                                  " appears in no string");
}

StringResult apply_string(const std::vector<ConvexSet>& sets, const IndexVector& t, const Vec& x) {
  if (t.empty()) throw std::invalid_argument("apply_string: empty index vector");
  require_finite(x, "apply_string input");
  const int m = static_cast<int>(sets.size());
  StringResult r;
  r.stages.reserve(t.size());
  const Vec* cur = &x;
  for (int i : t) {
    if (i < 1 || i > m)
      throw std::invalid_argument("apply_string: index " + std::to_string(i) +
                                  " out of range [1, " + std::to_string(m) + "]");
    r.stages.push_back(project(sets[static_cast<std::size_t>(i - 1)], *cur));
    cur = &r.stages.back();
  }
  r.endpoint = r.stages.back();
  return r;
}

double phi(const IndexVector& t, const Vec& x, const std::vector<Vec>& stages) {
  if (stages.size() != t.size())
    throw std::invalid_argument("phi: stage list length " + std::to_string(stages.size()) +
                                " does not match string length " + std::to_string(t.size()));
  double s = dist_sq(x, stages[0]);
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) s += dist_sq(stages[i + 1], stages[i]);
  return s;
}

AmalgamatorResult apply_amalgamator(const std::vector<ConvexSet>& sets, const Amalgamator& A,
                                    const Vec& x, bool parallel) {
  validate_amalgamator(A, static_cast<int>(sets.size()));
  require_finite(x, "apply_amalgamator input");
  for (const auto& s : sets) require_dim(x, set_dimension(s), "apply_amalgamator input");

  const int ns = static_cast<int>(A.strings.size());
  AmalgamatorResult out;
  out.per_string.resize(static_cast<std::size_t>(ns));

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < ns; ++i)
    out.per_string[static_cast<std::size_t>(i)] =
        apply_string(sets, A.strings[static_cast<std::size_t>(i)], x);

  // Sequential combination in listed order: reproducible bits.
  out.next.assign(x.size(), 0.0);
  for (int i = 0; i < ns; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double w = A.weights[idx];
    const Vec& e = out.per_string[idx].endpoint;
    for (std::size_t j = 0; j < x.size(); ++j) out.next[j] += w * e[j];
    out.phi_sum += phi(A.strings[idx], x, out.per_string[idx].stages);
  }
  return out;
}

StarReport validate_star(const Amalgamator& A, const StarConstraints& sc) {
  StarReport rep;
  auto fail = [&rep](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };

  if (sc.m < 1) fail("m must be >= 1");
  if (!(sc.delta > 0.0) || (sc.m >= 1 && !(sc.delta < 1.0 / sc.m)))
    fail("delta must lie in (0, 1/m)");
  if (sc.qbar < sc.m) fail("qbar must be >= m");

  if (A.strings.empty()) {
    fail("empty string family");
    return rep;
  }
  if (A.strings.size() != A.weights.size()) {
    fail("strings/weights size mismatch");
    return rep;
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < A.weights.size(); ++i) {
    const double w = A.weights[i];
    if (!std::isfinite(w) || w <= 0.0)
      fail("w(" + index_vector_to_string(A.strings[i]) + ")=" + std::to_string(w) +
           " must be strictly positive");
    else
      sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail("weights sum to " + std::to_string(sum) + ", must be 1");

  std::vector<bool> covered(static_cast<std::size_t>(std::max(sc.m, 1)) + 1, false);
  std::set<IndexVector> seen;
  for (std::size_t i = 0; i < A.strings.size(); ++i) {
    const auto& t = A.strings[i];
    const auto name = index_vector_to_string(t);
    if (t.empty()) {
      fail("empty index vector at position " + std::to_string(i));
      continue;
    }
    if (static_cast<int>(t.size()) > sc.qbar)
      fail("p(t)=" + std::to_string(t.size()) + " > qbar=" + std::to_string(sc.qbar) +
           " for t=" + name);
    if (A.weights[i] < sc.delta) {
      std::ostringstream os;
      os << "w(" << name << ")=" << A.weights[i] << " < delta=" << sc.delta;
      fail(os.str());
    }
    for (int j : t) {
      if (j < 1 || j > sc.m)
        fail("index " + std::to_string(j) + " out of range [1, " + std::to_string(sc.m) +
             "] in t=" + name);
      else
        covered[static_cast<std::size_t>(j)] = true;
    }
    if (!seen.insert(t).second) rep.warnings.push_back("duplicate string " + name);
  }
  for (int i = 1; i <= sc.m; ++i)
    if (!covered[static_cast<std::size_t>(i)])
      fail("not fit: index " + std::to_string(i) + " appears in no string");
  return rep;
}

}  // namespace dsap
