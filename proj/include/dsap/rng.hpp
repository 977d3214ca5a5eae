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

// Deterministic randomness helpers.  The generator is std::mt19937_64, whose
// output stream is fixed by the C++ standard, and all real-valued draws are
// derived from raw 64-bit outputs here (never via std distributions, whose
// algorithms are implementation-defined).  Same seed, same bytes, everywhere.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "dsap/linalg.hpp"

namespace dsap {

using Rng = std::mt19937_64;

/// splitmix64 mix step; used to derive per-iteration seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream));
}

/// Uniform in [0, 1), 53 random bits.
inline double uniform01(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

/// Uniform integer in [0, n), n >= 1.  Modulo bias is irrelevant at our scales.
inline std::uint64_t uniform_index(Rng& g, std::uint64_t n) { return g() % n; }

/// Standard normal via Box-Muller on our own uniforms.
inline double gaussian(Rng& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec gaussian_vec(Rng& g, std::size_t n) {
  Vec v(n);
  for (auto& x : v) x = gaussian(g);
  return v;
}

/// Uniform direction on the unit sphere.
inline Vec random_unit(Rng& g, std::size_t n) {
  for (;;) {
    Vec v = gaussian_vec(g, n);
    const double r = norm(v);
    if (r > 1e-12) {
      for (auto& x : v) x /= r;
      return v;
    }
  }
}

/// Fisher-Yates with our own index draws (std::shuffle is not portable).
template <typename T>
void shuffle(Rng& g, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace dsap
