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

// Closed convex sets with exact (closed-form) metric projections.
// Every operation is a pure function; instances are safe to share across
// threads once constructed.

#include <variant>

#include "dsap/linalg.hpp"

namespace dsap {

/// {x : <a, x> = b}, requires ||a|| > 0.
struct Hyperplane {
  Vec a;
  double b = 0.0;
};

/// {x : <a, x> <= b}, requires ||a|| > 0.
struct Halfspace {
  Vec a;
  double b = 0.0;
};

/// {x : ||x - center|| <= radius}, radius >= 0 (0 gives a singleton).
struct Ball {
  Vec center;
  double radius = 1.0;
};

/// {x : lower_i <= x_i <= upper_i}, lower <= upper coordinatewise.
struct Box {
  Vec lower;
  Vec upper;
};

using ConvexSet = std::variant<Hyperplane, Halfspace, Ball, Box>;

std::size_t set_dimension(const ConvexSet& s);

/// Throws std::invalid_argument on an invariant violation (zero normal,
/// negative radius, inverted box bounds, non-finite parameters).
void validate_set(const ConvexSet& s);

/// The unique nearest point of the set to x.
Vec project(const ConvexSet& s, const Vec& x);

/// d(x, S) = ||x - project(S, x)||, computed exactly that way.
double distance(const ConvexSet& s, const Vec& x);

/// true iff distance(s, x) <= tol.
bool contains(const ConvexSet& s, const Vec& x, double tol);

}  // namespace dsap
