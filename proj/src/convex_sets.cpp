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

#include "dsap/convex_sets.hpp"

#include <algorithm>

namespace dsap {

std::size_t set_dimension(const ConvexSet& s) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace>)
          return v.a.size();
        else if constexpr (std::is_same_v<T, Ball>)
          return v.center.size();
        else
          return v.lower.size();
      },
      s);
}

void validate_set(const ConvexSet& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace>) {
          require_finite(v.a, "set normal");
          if (!std::isfinite(v.b)) throw std::invalid_argument("set offset: non-finite");
          if (v.a.empty() || norm(v.a) == 0.0)
            throw std::invalid_argument("hyperplane/halfspace normal must be nonzero");
        } else if constexpr (std::is_same_v<T, Ball>) {
          require_finite(v.center, "ball center");
          if (v.center.empty()) throw std::invalid_argument("ball center must be nonempty");
          if (!std::isfinite(v.radius) || v.radius < 0.0)
            throw std::invalid_argument("ball radius must be finite and >= 0");
        } else {
          require_finite(v.lower, "box lower");
          require_finite(v.upper, "box upper");
          if (v.lower.empty() || v.lower.size() != v.upper.size())
            throw std::invalid_argument("box bounds must be nonempty and of equal dimension");
          for (std::size_t i = 0; i < v.lower.size(); ++i)
            if (v.lower[i] > v.upper[i]) throw std::invalid_argument("box bounds inverted");
        }
      },
      s);
}

namespace {

void check_input(const ConvexSet& s, const Vec& x) {
  require_finite(x, "projection input");
  require_dim(x, set_dimension(s), "projection input");
}

}  // namespace

Vec project(const ConvexSet& s, const Vec& x) {
  check_input(s, x);
  return std::visit(
      [&x](const auto& v) -> Vec {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hyperplane>) {
          const double step = (dot(v.a, x) - v.b) / norm_sq(v.a);
          return add_scaled(x, -step, v.a);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          const double excess = dot(v.a, x) - v.b;
          if (excess <= 0.0) return x;
          return add_scaled(x, -excess / norm_sq(v.a), v.a);
        } else if constexpr (std::is_same_v<T, Ball>) {
          const double d = dist(x, v.center);
          if (d <= v.radius) return x;
          return add_scaled(v.center, v.radius / d, sub(x, v.center));
        } else {
          Vec p(x.size());
          for (std::size_t i = 0; i < x.size(); ++i)
            p[i] = std::clamp(x[i], v.lower[i], v.upper[i]);
          return p;
        }
      },
      s);
}

double distance(const ConvexSet& s, const Vec& x) { return dist(x, project(s, x)); }

bool contains(const ConvexSet& s, const Vec& x, double tol) {
  if (!std::isfinite(tol) || tol < 0.0)
    throw std::invalid_argument("containment tolerance must be finite and >= 0");
  return distance(s, x) <= tol;
}

}  // namespace dsap
