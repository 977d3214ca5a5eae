#include <doctest.h>

#include <numeric>

#include "dsap/problems_io.hpp"
#include "dsap/strings.hpp"
#include "oracles.hpp"

using namespace dsap;

namespace {

const std::vector<ConvexSet> kTwoHalfspaces{Halfspace{{1, 0}, 0}, Halfspace{{0, 1}, 0}};

// Random amalgamator in the admissible class for m sets: a shuffled covering
// partition plus optional extra strings, weights >= delta.
Amalgamator random_star_amalgamator(Rng& g, int m, double delta, int qbar) {
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 1);
  shuffle(g, order);
  std::vector<IndexVector> strings;
  std::size_t pos = 0;
  while (pos < order.size()) {
    const std::size_t len =
        1 + uniform_index(g, std::min<std::uint64_t>(static_cast<std::uint64_t>(qbar),
                                                     order.size() - pos));
    strings.emplace_back(order.begin() + static_cast<long>(pos),
                         order.begin() + static_cast<long>(pos + len));
    pos += len;
  }
  // occasionally an extra repeated-index string
  if (uniform01(g) < 0.3) {
    IndexVector extra;
    const std::size_t len = 1 + uniform_index(g, static_cast<std::uint64_t>(qbar));
    for (std::size_t i = 0; i < len; ++i)
      extra.push_back(1 + static_cast<int>(uniform_index(g, static_cast<std::uint64_t>(m))));
    strings.push_back(std::move(extra));
  }
  const auto M = strings.size();
  // weights: delta floor plus random surplus, normalized to 1
  std::vector<double> w(M);
  double surplus_total = 0.0;
  for (auto& wi : w) {
    wi = uniform01(g) + 0.01;
    surplus_total += wi;
  }
  const double free_mass = 1.0 - delta * static_cast<double>(M);
  REQUIRE(free_mass > 0.0);
  for (auto& wi : w) wi = delta + free_mass * wi / surplus_total;
  return make_amalgamator(std::move(strings), std::move(w));
}

}  // namespace

TEST_CASE("apply_string composes projections in order") {
  SUBCASE("single-projection string") {
    const Vec x{2, 3};
    const auto r = apply_string(kTwoHalfspaces, {1}, x);
    CHECK(r.endpoint == project(kTwoHalfspaces[0], x));
    REQUIRE(r.stages.size() == 1);
    CHECK(r.stages[0] == r.endpoint);
  }
  SUBCASE("hand-composed two-halfspace chain") {
    const auto r = apply_string(kTwoHalfspaces, {1, 2}, {1, 1});
    REQUIRE(r.stages.size() == 2);
    CHECK(dist(r.stages[0], {0, 1}) <= 1e-15);
    CHECK(dist(r.stages[1], {0, 0}) <= 1e-15);
    CHECK(dist(r.endpoint, {0, 0}) <= 1e-15);
    // cross-check each stage against the grid projector oracle
    double res = 0.0;
    const Vec brute = oracle::project_grid_2d(kTwoHalfspaces[0], {1, 1}, &res);
    CHECK(dist(r.stages[0], brute) <= 3 * res + 1e-9);
  }
  SUBCASE("a feasible point is a fixed point of every string") {
    const Vec x{-1, -1};
    const auto r = apply_string(kTwoHalfspaces, {2, 1, 2}, x);
    for (const auto& stage : r.stages) CHECK(dist(stage, x) == 0.0);
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(apply_string(kTwoHalfspaces, {3}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(apply_string(kTwoHalfspaces, {0}, {0, 0}), std::invalid_argument);
  }
}

TEST_CASE("phi") {
  SUBCASE("single-index string gives squared distance") {
    const Vec x{2, 3};
    const auto r = apply_string(kTwoHalfspaces, {1}, x);
    CHECK(phi({1}, x, r.stages) ==
          doctest::Approx(distance(kTwoHalfspaces[0], x) * distance(kTwoHalfspaces[0], x)));
  }
  SUBCASE("feasible point gives zero") {
    const Vec x{-2, -5};
    const auto r = apply_string(kTwoHalfspaces, {1, 2, 1}, x);
    CHECK(phi({1, 2, 1}, x, r.stages) == 0.0);
  }
  SUBCASE("hand-computed value on the (1,1) chain") {
    const Vec x{1, 1};
    const auto r = apply_string(kTwoHalfspaces, {1, 2}, x);
    CHECK(phi({1, 2}, x, r.stages) == doctest::Approx(2.0));
    // independent recomputation from raw projections
    const Vec s1 = project(kTwoHalfspaces[0], x);
    const Vec s2 = project(kTwoHalfspaces[1], s1);
    CHECK(phi({1, 2}, x, r.stages) == doctest::Approx(dist_sq(x, s1) + dist_sq(s2, s1)));
  }
  SUBCASE("stage-length mismatch") {
    const Vec x{1, 1};
    const auto r = apply_string(kTwoHalfspaces, {1, 2}, x);
    CHECK_THROWS_AS(phi({1}, x, r.stages), std::invalid_argument);
  }
}

TEST_CASE("apply_amalgamator") {
  SUBCASE("single string of weight one reduces to the string operator") {
    const Vec x{2, 3};
    const Amalgamator single = make_amalgamator({{1, 2}}, {1.0});
    const auto r = apply_amalgamator(kTwoHalfspaces, single, x);
    CHECK(r.next == apply_string(kTwoHalfspaces, {1, 2}, x).endpoint);
  }
  SUBCASE("feasible point is fixed") {
    const Amalgamator A = make_amalgamator({{1}, {2}}, {0.5, 0.5});
    const Vec x{-1, -2};
    const auto r = apply_amalgamator(kTwoHalfspaces, A, x);
    CHECK(dist(r.next, x) == 0.0);
    CHECK(r.phi_sum == 0.0);
  }
  SUBCASE("two singleton strings, equal weights") {
    const Amalgamator A = make_amalgamator({{1}, {2}}, {0.5, 0.5});
    const auto r = apply_amalgamator(kTwoHalfspaces, A, {1, 1});
    CHECK(dist(r.next, {0.5, 0.5}) <= 1e-15);
  }
  SUBCASE("invariant violations error before computation") {
    CHECK_THROWS_AS(apply_amalgamator(kTwoHalfspaces, Amalgamator{{{1}}, {1.0}}, {0, 0}),
                    std::invalid_argument);  // not fit: 2 missing
    CHECK_THROWS_AS(apply_amalgamator(kTwoHalfspaces, Amalgamator{{{1}, {2}}, {0.7, 0.7}}, {0, 0}),
                    std::invalid_argument);  // weights do not sum to 1
  }
  SUBCASE("serial and parallel evaluation are bitwise identical") {
    Rng g(99);
    const Problem p = generate_random(GeneratorKind::Mixed, 8, 12, 3, 0.1);
    const Amalgamator A = random_star_amalgamator(g, 12, 0.01, 12);
    Vec x = gaussian_vec(g, 8);
    const auto serial = apply_amalgamator(p.sets, A, x, false);
    const auto parallel = apply_amalgamator(p.sets, A, x, true);
    CHECK(serial.next == parallel.next);
    CHECK(serial.phi_sum == parallel.phi_sum);
  }
}

TEST_CASE("amalgamator construction") {
  // renormalizes within 1e-9
  const Amalgamator A = make_amalgamator({{1}, {2}}, {0.5 + 2e-10, 0.5});
  double sum = 0.0;
  for (double w : A.weights) sum += w;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  // rejects beyond 1e-9
  CHECK_THROWS_AS(make_amalgamator({{1}, {2}}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(make_amalgamator({{1}, {2}}, {1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_amalgamator({}, {}), std::invalid_argument);
}

TEST_CASE("validate_star") {
  const StarConstraints sc{2, 0.4, 2};
  SUBCASE("valid") {
    const auto rep = validate_star(make_amalgamator({{1}, {2}}, {0.5, 0.5}), sc);
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
  }
  SUBCASE("weight below delta") {
    const auto rep = validate_star(make_amalgamator({{1}, {2}}, {0.7, 0.3}), sc);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find("w((2))=0.3") != std::string::npos);
    CHECK(rep.violations[0].find("delta=0.4") != std::string::npos);
  }
  SUBCASE("string too long") {
    const auto rep = validate_star(make_amalgamator({{1, 2, 1}}, {1.0}), sc);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find("p(t)=3 > qbar=2") != std::string::npos);
  }
  SUBCASE("duplicate strings warn but pass") {
    const StarConstraints sc4{2, 0.1, 4};
    const auto rep = validate_star(make_amalgamator({{1, 2}, {1, 2}}, {0.5, 0.5}), sc4);
    CHECK(rep.ok);
    CHECK_FALSE(rep.warnings.empty());
  }
  SUBCASE("validation never throws") {
    const auto rep = validate_star(Amalgamator{}, StarConstraints{0, -1.0, 0});
    CHECK_FALSE(rep.ok);
  }
}

TEST_CASE("operator properties and certificates on random instances") {
  Rng g(777);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(uniform_index(g, 6));
    const int m = 2 + static_cast<int>(uniform_index(g, 8));
    const Problem p =
        generate_random(rep % 2 ? GeneratorKind::Mixed : GeneratorKind::Halfspaces, n, m,
                        1000 + static_cast<std::uint64_t>(rep), 0.2);
    const double delta = 1.0 / (2.0 * m + 2.0);
    const int qbar = m + 2;
    const Amalgamator A = random_star_amalgamator(g, m, delta, qbar);
    REQUIRE(validate_star(A, StarConstraints{m, delta, qbar}).ok);

    Vec x = gaussian_vec(g, static_cast<std::size_t>(n));
    Vec y = gaussian_vec(g, static_cast<std::size_t>(n));
    for (auto& c : x) c *= 3.0;
    for (auto& c : y) c *= 3.0;
    const Vec& z = *p.feasible_point;

    const auto rx = apply_amalgamator(p.sets, A, x);
    const auto ry = apply_amalgamator(p.sets, A, y);

    // nonexpansiveness of the averaged operator
    CHECK(dist(rx.next, ry.next) <= dist(x, y) + 1e-10);

    const double scale = 1e-9 * (1.0 + dist_sq(z, x));
    // single-string inequality
    const auto& t = A.strings[uniform_index(g, A.strings.size())];
    const auto st = apply_string(p.sets, t, x);
    CHECK(dist_sq(z, x) >= dist_sq(z, st.endpoint) + phi(t, x, st.stages) - scale);
    // averaged-operator inequality with the delta-weighted merit sum
    CHECK(dist_sq(z, x) >= dist_sq(z, rx.next) + delta * rx.phi_sum - scale);

    // nonexpansiveness of the string operator
    const auto sy = apply_string(p.sets, t, y);
    CHECK(dist(st.endpoint, sy.endpoint) <= dist(x, y) + 1e-10);

    // phi >= 0, and phi == 0 forces a fixed point
    CHECK(rx.phi_sum >= 0.0);
    if (rx.phi_sum == 0.0) CHECK(dist(rx.next, x) <= 1e-10);
  }
}

TEST_CASE("fixed-point property on generated feasible points") {
  Rng g(31);
  for (int rep = 0; rep < 30; ++rep) {
    const Problem p = generate_random(GeneratorKind::Mixed, 5, 7, static_cast<std::uint64_t>(rep),
                                      0.3);
    const Amalgamator A = random_star_amalgamator(g, 7, 0.05, 9);
    const auto r = apply_amalgamator(p.sets, A, *p.feasible_point);
    CHECK(dist(r.next, *p.feasible_point) <= 1e-10);
  }
}
