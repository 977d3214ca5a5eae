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

// Benchmarks the averaged string operator: serial reference vs OpenMP over
// strings.  Both paths share the sequential combination step, so the outputs
// must match bit for bit; the benchmark asserts that too.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsap/problems_io.hpp"
#include "dsap/rng.hpp"

using namespace dsap;

namespace {

double time_amalgamator(const Problem& p, const Amalgamator& A, const Vec& x, bool parallel,
                        int reps, Vec& out) {
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    auto res = apply_amalgamator(p.sets, A, x, parallel);
    out = std::move(res.next);
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int n = 20000;
  int m = 64;
  int reps = 20;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) m = std::atoi(argv[2]);
  if (argc > 3) reps = std::atoi(argv[3]);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; comparing two serial passes\n");
#endif
  std::printf("n=%d, m=%d, reps=%d\n", n, m, reps);

  const Problem p = generate_random(GeneratorKind::Mixed, n, m, 42, 0.1);

  // Simultaneous family: m singleton strings, the widest parallel fan-out.
  std::vector<IndexVector> strings;
  for (int i = 1; i <= m; ++i) strings.push_back({i});
  const Amalgamator A =
      make_amalgamator(std::move(strings), std::vector<double>(m, 1.0 / m));

  Rng g(7);
  Vec x = gaussian_vec(g, static_cast<std::size_t>(n));
  for (auto& c : x) c *= 10.0;

  Vec serial_out, parallel_out;
  const double t_serial = time_amalgamator(p, A, x, false, reps, serial_out);
  const double t_parallel = time_amalgamator(p, A, x, true, reps, parallel_out);

  if (std::memcmp(serial_out.data(), parallel_out.data(), serial_out.size() * sizeof(double)) !=
      0) {
    std::fprintf(stderr, "FAIL: serial and parallel results differ\n");
    return 1;
  }

  std::printf("serial:   %.6f s/apply\n", t_serial);
  std::printf("parallel: %.6f s/apply\n", t_parallel);
  std::printf("speedup:  %.2fx (results bitwise identical)\n", t_serial / t_parallel);
  return 0;
}
