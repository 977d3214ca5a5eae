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

// Index vectors (strings), string operators, amalgamators (weighted fit
// families of strings) and the averaged operator built from them.
//
// The convex combination of string end-points is always accumulated
// sequentially in the listed order of the family, so results are
// bit-reproducible across runs and thread counts; only the independent
// per-string projection chains run in parallel.

#include <string>
#include <vector>

#include "dsap/convex_sets.hpp"

namespace dsap {

/// A string t = (t_1, ..., t_p) of 1-based set indices; repetitions allowed.
using IndexVector = std::vector<int>;

/// A fit family of strings with strictly positive weights summing to 1.
struct Amalgamator {
  std::vector<IndexVector> strings;
  std::vector<double> weights;
};

/// Constraints carving out the admissible subclass: string lengths <= qbar,
/// weights >= delta, with delta in (0, 1/m) and qbar >= m.
struct StarConstraints {
  int m = 1;
  double delta = 0.0;
  int qbar = 1;
};

/// Throws std::invalid_argument unless 0 < delta < 1/m and qbar >= m >= 1.
void validate_star_constraints(const StarConstraints& sc);

/// Builds an amalgamator, checking shape and weights.  A weight sum within
/// 1e-9 of 1 is renormalized; a larger deviation throws.
Amalgamator make_amalgamator(std::vector<IndexVector> strings, std::vector<double> weights);

/// Throws std::invalid_argument unless A satisfies all amalgamator
/// invariants for a problem with m sets (positive weights summing to 1,
/// indices in [1, m], every index covered by some string).
void validate_amalgamator(const Amalgamator& A, int m);

struct StringResult {
  Vec endpoint;            // P_{t_p}(...P_{t_1}(x))
  std::vector<Vec> stages; // the p intermediate points, in application order
};

/// Applies the projections of t to x in order.
StringResult apply_string(const std::vector<ConvexSet>& sets, const IndexVector& t, const Vec& x);

/// The squared-displacement merit of the string applied at x:
/// ||x - stage_1||^2 + sum_i ||stage_{i+1} - stage_i||^2.
double phi(const IndexVector& t, const Vec& x, const std::vector<Vec>& stages);

struct AmalgamatorResult {
  Vec next;                              // weighted combination of endpoints
  std::vector<StringResult> per_string;  // aligned with A.strings
  double phi_sum = 0.0;                  // unweighted sum of phi over strings
};

/// Evaluates every string of A at x and combines the endpoints.  When
/// `parallel` is true and OpenMP is available the per-string chains run in
/// parallel; the combination is sequential either way, so the result is
/// identical bit for bit.
AmalgamatorResult apply_amalgamator(const std::vector<ConvexSet>& sets, const Amalgamator& A,
                                    const Vec& x, bool parallel = false);

struct StarReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;  // e.g. duplicate strings
};

/// Checks A against sc.  Never throws; every violated clause is listed.
StarReport validate_star(const Amalgamator& A, const StarConstraints& sc);

std::string index_vector_to_string(const IndexVector& t);

}  // namespace dsap
