#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "martlab/integrand.hpp"
#include "martlab/simulate.hpp"
#include "martlab/stats.hpp"
#include "martlab/stopping.hpp"

using namespace martlab;

namespace {

PathEnsemble toy(int level, std::vector<std::vector<double>> rows) {
  PathEnsemble S;
  S.grid = make_grid(level);
  S.n_paths = rows.size();
  S.model = ModelDescriptor::derived("toy");
  S.synthesis = "manual";
  for (auto& r : rows) {
    REQUIRE(r.size() == S.cols());
    S.data.insert(S.data.end(), r.begin(), r.end());
  }
  return S;
}

ElementaryIntegrand elem(int level, std::vector<std::vector<double>> coeffs) {
  ElementaryIntegrand h;
  h.level = level;
  h.n_paths = coeffs.size();
  for (auto& r : coeffs) {
    REQUIRE(r.size() == (std::size_t{1} << level));
    h.coeff.insert(h.coeff.end(), r.begin(), r.end());
  }
  h.declared_bound = sup_norm(h);
  return h;
}

}  // namespace

TEST_CASE("elementary integration is the coefficient dot increments") {
  PathEnsemble S = toy(2, {{0.0, 1.0, 3.0, 2.0, 5.0}});
  ElementaryIntegrand h = elem(2, {{1.0, -1.0, 0.5, 2.0}});
  auto v = integrate(S, h);
  // 1*1 + (-1)*2 + 0.5*(-1) + 2*3 = 4.5
  CHECK(v[0] == doctest::Approx(4.5).epsilon(1e-15));

  // integrating on a coarser level strides over fine points
  ElementaryIntegrand c = elem(1, {{1.0, -1.0}});
  auto w = integrate(S, c);
  // 1*(3-0) + (-1)*(5-3) = 1
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integral process tabulates running partial sums") {
  PathEnsemble S = toy(2, {{0.0, 1.0, 3.0, 2.0, 5.0}});
  ElementaryIntegrand h = elem(2, {{1.0, -1.0, 0.5, 2.0}});
  PathEnsemble I = integral_process(S, h);
  CHECK(I.value(0, 0) == 0.0);
  CHECK(I.value(0, 1) == 1.0);
  CHECK(I.value(0, 2) == -1.0);
  CHECK(I.value(0, 3) == -1.5);
  CHECK(I.value(0, 4) == 4.5);
  CHECK(I.value(0, 4) == integrate(S, h)[0]);
}

TEST_CASE("integrand shape validation") {
  ElementaryIntegrand h = elem(2, {{1.0, 1.0, 1.0, 1.0}});
  PathEnsemble S = toy(2, {{0.0, 1.0, 3.0, 2.0, 5.0},
                           {0.0, 0.0, 0.0, 0.0, 0.0}});
  CHECK_THROWS_AS(integrate(S, h), std::invalid_argument);  // path mismatch

  ElementaryIntegrand bad = elem(2, {{1.0, 1.0, 1.0, 1.0}});
  bad.coeff.push_back(0.0);
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);

  PathEnsemble coarse = toy(1, {{0.0, 1.0, 2.0}});
  ElementaryIntegrand fine = elem(2, {{1.0, 1.0, 1.0, 1.0}});
  CHECK_THROWS_AS(integrate(coarse, fine), std::invalid_argument);
}

TEST_CASE("simple integrands pay value differences between breakpoints") {
  PathEnsemble S = toy(2, {{0.0, 1.0, 3.0, 2.0, 5.0}});
  SimpleIntegrand h;
  h.taus = {constant_stopping(2, 1, 0), constant_stopping(2, 1, 2),
            constant_stopping(2, 1, 4)};
  h.values = {{2.0}, {-1.0}};
  h.declared_bound = 2.0;
  auto v = integrate(S, h);
  // 2*(S_{1/2} - S_0) + (-1)*(S_1 - S_{1/2}) = 2*3 - 2 = 4
  CHECK(v[0] == doctest::Approx(4.0).epsilon(1e-15));

  // an inf breakpoint holds its piece to the horizon
  SimpleIntegrand g;
  g.taus = {constant_stopping(2, 1, 1), never_stopping(2, 1)};
  g.values = {{1.0}};
  g.declared_bound = 1.0;
  // S_1 - S_{1/4} = 5 - 1
  CHECK(integrate(S, g)[0] == doctest::Approx(4.0).epsilon(1e-15));

  PathEnsemble IP = integral_process(S, h);
  CHECK(IP.value(0, 0) == 0.0);
  CHECK(IP.value(0, 1) == 2.0);   // 2*(1-0)
  CHECK(IP.value(0, 2) == 6.0);   // 2*(3-0)
  CHECK(IP.value(0, 3) == 7.0);   // 6 + (-1)*(2-3)
  CHECK(IP.value(0, 4) == 4.0);
}

TEST_CASE("simple integrand validation catches disorder") {
  SimpleIntegrand h;
  h.taus = {constant_stopping(2, 1, 3), constant_stopping(2, 1, 1)};
  h.values = {{1.0}};
  CHECK_THROWS_AS(h.check(), std::invalid_argument);  // breakpoints decrease

  SimpleIntegrand g;
  g.taus = {constant_stopping(2, 1, 0), constant_stopping(3, 1, 4)};
  g.values = {{1.0}};
  CHECK_THROWS_AS(g.check(), std::invalid_argument);  // mixed levels
}

TEST_CASE("riemann sums equal integrating the discretized process bit for bit") {
  PathEnsemble S = simulate(ModelDescriptor::brownian(0.1, 1.0), 8, 300, 23);
  for (const auto& K : {k_constant(1.0), k_identity(), k_exp_neg_sq(),
                        k_time(), k_interp_lagged_sign(2)}) {
    for (int n : {3, 5, 8}) {
      auto direct = riemann_sum(S, K, n);
      auto via = integrate(S, discretize(S, K, n));
      CHECK(direct == via);
    }
  }
}

TEST_CASE("discretize freezes K at left endpoints with lag zero") {
  PathEnsemble S = toy(2, {{0.0, 1.0, 3.0, 2.0, 5.0}});
  ElementaryIntegrand h = discretize(S, k_identity(), 1);
  CHECK(h.lag == CoeffLag::LagZero);
  CHECK(h.level == 1);
  CHECK(h.at(0, 0) == 0.0);  // S_0
  CHECK(h.at(0, 1) == 3.0);  // S_{1/2}
}

TEST_CASE("interpolated lagged-sign process tabulates increment signs") {
  PathEnsemble S = toy(3, {{0.0, 1.0, 0.5, 0.5, 2.0, 1.0, 3.0, 3.5, 4.0}});
  TabulatedProcess K = k_interp_lagged_sign(2);
  CHECK(K.sup_bound == 1.0);
  CHECK(K.eval(S, 0, 0) == 0.0);  // before the lag is observable
  CHECK(K.eval(S, 0, 1) == 0.0);
  CHECK(K.eval(S, 0, 2) == 1.0);    // sign(S_1 - S_0)
  CHECK(K.eval(S, 0, 3) == -1.0);   // sign(S_2 - S_1)
  CHECK(K.eval(S, 0, 4) == 0.0);    // sign(S_3 - S_2) = sign(0)
  CHECK(K.eval(S, 0, 5) == 1.0);
}

TEST_CASE("shift pushes breakpoints two cells right and keeps lag one") {
  // H = 1_{(0,1]} on D_3 becomes 1_{(2/8, 1]}
  SimpleIntegrand h;
  h.taus = {constant_stopping(3, 1, 0), constant_stopping(3, 1, 8)};
  h.values = {{1.0}};
  h.declared_bound = 1.0;
  ElementaryIntegrand e = shift_to_elementary(h, 3);
  CHECK(e.lag == CoeffLag::LagOne);
  std::vector<double> want = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  for (std::size_t i = 0; i < 8; ++i) CHECK(e.at(0, i) == want[i]);

  // a mid-grid breakpoint lands two cells after its floor
  SimpleIntegrand g;
  g.taus = {constant_stopping(3, 1, 3), never_stopping(3, 1)};
  g.values = {{-2.0}};
  g.declared_bound = 2.0;
  ElementaryIntegrand e2 = shift_to_elementary(g, 3);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(e2.at(0, i) == (i >= 5 ? -2.0 : 0.0));

  // refining the breakpoint grid: tau given on D_1, shifted on D_4
  SimpleIntegrand f;
  f.taus = {constant_stopping(1, 1, 1), never_stopping(1, 1)};
  f.values = {{1.0}};
  f.declared_bound = 1.0;
  ElementaryIntegrand e3 = shift_to_elementary(f, 4);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(e3.at(0, i) == (i >= 10 ? 1.0 : 0.0));  // floor(0.5*16)+2 = 10

  // near the horizon the shift clamps at the last cell boundary
  SimpleIntegrand near;
  near.taus = {constant_stopping(3, 1, 7), never_stopping(3, 1)};
  near.values = {{1.0}};
  near.declared_bound = 1.0;
  ElementaryIntegrand e4 = shift_to_elementary(near, 3);
  for (std::size_t i = 0; i < 8; ++i) CHECK(e4.at(0, i) == 0.0);
}

TEST_CASE("shifted integrals converge to the unshifted ones as the grid refines") {
  // |I(H) - I(H_shifted)| <= bound * 2 * osc over two cells; for BM the
  // expected squared gap at level n is bound^2 * 2 * 2^{-n} * pieces
  PathEnsemble S = simulate(ModelDescriptor::brownian(0.0, 1.0), 10, 4000, 3);
  SimpleIntegrand h;
  h.taus = {constant_stopping(10, 4000, 0), constant_stopping(10, 4000, 512),
            never_stopping(10, 4000)};
  h.values = {std::vector<double>(4000, 1.0), std::vector<double>(4000, -1.0)};
  h.declared_bound = 1.0;
  auto exact = integrate(S, h);
  double prev_rms = 1e9;
  for (int n : {4, 6, 8, 10}) {
    auto via = integrate(S, shift_to_elementary(h, n));
    double rms = 0.0;
    for (std::size_t p = 0; p < 4000; ++p)
      rms += (via[p] - exact[p]) * (via[p] - exact[p]);
    rms = std::sqrt(rms / 4000.0);
    CHECK(rms < prev_rms + 1e-9);
    prev_rms = rms;
  }
  CHECK(prev_rms < 0.15);  // three-cell window at level 10: sd ~ sqrt(3/1024)
}

TEST_CASE("lagged sign integrand looks back the declared number of cells") {
  PathEnsemble S = toy(2, {{0.0, 2.0, 1.0, 3.0, 3.0}});
  ElementaryIntegrand h1 = lagged_sign_integrand(S, 2, 1);
  CHECK(h1.lag == CoeffLag::LagZero);
  CHECK(h1.at(0, 0) == 0.0);
  CHECK(h1.at(0, 1) == 1.0);   // sign(2-0)
  CHECK(h1.at(0, 2) == -1.0);  // sign(1-2)
  CHECK(h1.at(0, 3) == 1.0);   // sign(3-1)

  ElementaryIntegrand h2 = lagged_sign_integrand(S, 2, 2);
  CHECK(h2.lag == CoeffLag::LagOne);
  CHECK(h2.at(0, 0) == 0.0);
  CHECK(h2.at(0, 1) == 0.0);
  CHECK(h2.at(0, 2) == 1.0);   // sign(2-0)
  CHECK(h2.at(0, 3) == -1.0);  // sign(1-2)
}

TEST_CASE("lag-1 sign integral matches the fgn expectation") {
  // E integral = (2^n - 1) rho_H sqrt(2/pi) 2^{-nH} with
  // rho_H = 2^{2H-1} - 1; smoke version of the growth-law acceptance run
  double h = 0.75;
  int n = 6;
  PathEnsemble S = simulate(ModelDescriptor::fractional_brownian(h), n, 20000, 29);
  auto v = integrate(S, lagged_sign_integrand(S, n, 1));
  double rho = std::pow(2.0, 2.0 * h - 1.0) - 1.0;
  double want = (std::pow(2.0, n) - 1.0) * rho *
                std::sqrt(2.0 / std::numbers::pi) * std::pow(2.0, -n * h);
  double se = stderr_of_mean(v);
  CHECK(std::fabs(mean(v) - want) < 4.0 * se);
}

TEST_CASE("gating by a stopping time equals integrating the stopped paths") {
  PathEnsemble S = simulate(ModelDescriptor::brownian(0.0, 1.0), 7, 500, 57);
  StoppingTimeVector rho = first_passage(S, hits_abs_above(0.6));
  ElementaryIntegrand h = lagged_sign_integrand(S, 7, 1);

  ElementaryIntegrand gated = gate_by_stopping(h, rho);
  auto a = integrate(S, gated);
  auto b = integrate(stop(S, rho), h);
  for (std::size_t p = 0; p < S.n_paths; ++p) CHECK(a[p] == b[p]);

  // a gated cell is exactly zeroed, surviving cells untouched
  for (std::size_t p = 0; p < S.n_paths; ++p)
    for (std::size_t i = 0; i < h.cells(); ++i) {
      if (static_cast<std::int64_t>(i) < rho.idx[p])
        CHECK(gated.at(p, i) == h.at(p, i));
      else
        CHECK(gated.at(p, i) == 0.0);
    }

  StoppingTimeVector coarse = constant_stopping(3, 500, 2);
  CHECK_THROWS_AS(gate_by_stopping(h, coarse), std::invalid_argument);
}

TEST_CASE("sup norms") {
  ElementaryIntegrand h = elem(2, {{0.5, -2.0, 0.0, 1.0}});
  CHECK(sup_norm(h) == 2.0);
  SimpleIntegrand s;
  s.taus = {constant_stopping(2, 2, 0), constant_stopping(2, 2, 4)};
  s.values = {{0.25, -3.0}};
  CHECK(sup_norm(s) == 3.0);
}
