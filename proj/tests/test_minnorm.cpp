#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "martlab/minnorm.hpp"
#include "martlab/rng.hpp"

using namespace martlab;

namespace {

double norm2_of_combo(const std::vector<std::vector<double>>& vs,
                      const std::vector<double>& w) {
  std::vector<double> acc(vs[0].size(), 0.0);
  for (std::size_t k = 0; k < vs.size(); ++k)
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w[k] * vs[k][j];
  double s = 0.0;
  for (double v : acc) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("single vector gets weight one") {
  MinNormResult r = min_norm_convex({{3.0, -4.0}});
  REQUIRE(r.weights.size() == 1);
  CHECK(r.weights[0] == 1.0);
  CHECK(r.objective == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("two orthonormal vectors meet at the midpoint") {
  MinNormResult r = min_norm_convex({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.gap <= 1e-8);
}

TEST_CASE("opposed vectors cancel entirely") {
  MinNormResult r = min_norm_convex({{2.0, 0.0}, {-2.0, 0.0}});
  CHECK(r.objective <= 1e-10);
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("weights stay on the simplex and beat every vertex") {
  Rng rng(99, 1);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t k = 1 + static_cast<std::size_t>(rng.next_unit() * 3.0);
    if (k > 3) k = 3;
    std::size_t dim = 1 + static_cast<std::size_t>(rng.next_unit() * 5.0);
    if (dim > 5) dim = 5;
    std::vector<std::vector<double>> vs(k, std::vector<double>(dim));
    for (auto& v : vs)
      for (auto& x : v) x = 0.4 * (rng.next_unit() - 0.5);
    MinNormResult r = min_norm_convex(vs, 1e-10);
    REQUIRE(r.weights.size() == k);
    double sum = 0.0;
    for (double w : r.weights) {
      CHECK(w >= -1e-12);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.objective ==
          doctest::Approx(norm2_of_combo(vs, r.weights)).epsilon(1e-9));
    for (const auto& v : vs) {
      double n2 = 0.0;
      for (double x : v) n2 += x * x;
      CHECK(r.objective <= n2 + 1e-12);
    }
    CHECK(r.gap <= 1e-10 + 1e-15);
  }
}

TEST_CASE("matches an exhaustive simplex scan on random instances") {
  // twenty seeded instances, k <= 3 vectors in dimension <= 5
  Rng rng(0xB1C57E1E, 7);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t k = 1 + static_cast<std::size_t>(rng.next_unit() * 3.0);
    if (k > 3) k = 3;
    std::size_t dim = 1 + static_cast<std::size_t>(rng.next_unit() * 5.0);
    if (dim > 5) dim = 5;
    std::vector<std::vector<double>> vs(k, std::vector<double>(dim));
    for (auto& v : vs)
      for (auto& x : v) x = 0.2 * (rng.next_unit() - 0.5);
    MinNormResult r = min_norm_convex(vs, 1e-12);
    double brute = min_norm_brute_force(vs, 1e-3);
    // the scan sits on a lattice, so it can only overshoot the optimum
    CHECK(r.objective <= brute + 1e-9);
    CHECK(std::fabs(r.objective - brute) < 1e-6);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(min_norm_convex({}), std::invalid_argument);
  CHECK_THROWS_AS(min_norm_convex({{1.0, 2.0}, {1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(min_norm_brute_force({{1.0}, {2.0}, {3.0}, {4.0}}, 0.1),
                  std::invalid_argument);
}
