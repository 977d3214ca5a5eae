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

// Problem files (.cfp.json), random consistent-problem generators, and
// trace serialization (.trace.csv).  All serialization is byte-stable:
// shortest round-trip decimals for JSON, 17 significant digits for CSV,
// and a fixed PRNG (std::mt19937_64 with in-repo distributions) for the
// generators.

#include <cstdint>
#include <string>

#include "dsap/solver.hpp"

namespace dsap {

/// Loads and validates a problem file.  Errors carry the path and, where
/// possible, the offending field or set index.
Problem load_problem(const std::string& path);

/// Canonical serialized form (sorted keys, two-space indent, trailing
/// newline).  parse -> serialize -> parse is the identity.
std::string serialize_problem(const Problem& p);

void save_problem(const Problem& p, const std::string& path);

Problem parse_problem(const std::string& text, const std::string& context);

enum class GeneratorKind { Halfspaces, Mixed };

/// Draws a feasible anchor, then m sets each containing the ball of radius
/// `margin` around it; the anchor is recorded as the known feasible point.
/// Deterministic in the seed.
Problem generate_random(GeneratorKind kind, int n, int m, std::uint64_t seed, double margin);

std::string serialize_trace(const IterationTrace& trace);
void write_trace(const IterationTrace& trace, const std::string& path);
IterationTrace read_trace(const std::string& path);

}  // namespace dsap
