#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "martlab/fft.hpp"
#include "martlab/model.hpp"
#include "martlab/simulate.hpp"
#include "martlab/stats.hpp"

using namespace martlab;

namespace {

// empirical covariance of path values at two fixed grid indices
double empirical_cov(const PathEnsemble& S, std::size_t i, std::size_t j) {
  double mi = 0.0, mj = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    mi += S.value(p, i);
    mj += S.value(p, j);
  }
  mi /= static_cast<double>(S.n_paths);
  mj /= static_cast<double>(S.n_paths);
  double c = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p)
    c += (S.value(p, i) - mi) * (S.value(p, j) - mj);
  return c / static_cast<double>(S.n_paths - 1);
}

}  // namespace

TEST_CASE("fft round trip and delta spectrum") {
  std::vector<std::complex<double>> x(16);
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = {std::cos(0.3 * k), std::sin(1.1 * k)};
  auto y = x;
  fft_inplace(y, false);
  fft_inplace(y, true);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(std::fabs(y[k].real() - x[k].real()) < 1e-12);
    CHECK(std::fabs(y[k].imag() - x[k].imag()) < 1e-12);
  }

  std::vector<std::complex<double>> delta(8, {0.0, 0.0});
  delta[0] = {1.0, 0.0};
  fft_inplace(delta, false);
  for (const auto& v : delta) {
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(v.imag()) < 1e-12);
  }

  std::vector<std::complex<double>> bad(6);
  CHECK_THROWS_AS(fft_inplace(bad, false), std::invalid_argument);
}

TEST_CASE("simulation is deterministic and prefix-stable in n_paths") {
  auto model = ModelDescriptor::brownian(0.2, 1.0);
  PathEnsemble a = simulate(model, 6, 50, 99);
  PathEnsemble b = simulate(model, 6, 50, 99);
  CHECK(a.data == b.data);

  PathEnsemble big = simulate(model, 6, 80, 99);
  for (std::size_t p = 0; p < 50; ++p)
    for (std::size_t i = 0; i < a.cols(); ++i)
      CHECK(big.value(p, i) == a.value(p, i));

  PathEnsemble other = simulate(model, 6, 50, 100);
  CHECK(a.data != other.data);
}

#ifdef _OPENMP
TEST_CASE("simulation does not depend on the omp thread count") {
  auto model = ModelDescriptor::fractional_brownian(0.75);
  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  PathEnsemble a = simulate(model, 7, 64, 5);
  omp_set_num_threads(4);
  PathEnsemble b = simulate(model, 7, 64, 5);
  omp_set_num_threads(saved);
  CHECK(a.data == b.data);
}
#endif

TEST_CASE("brownian ensembles have the right increment moments") {
  auto model = ModelDescriptor::brownian(0.5, 2.0);
  PathEnsemble S = simulate(model, 5, 40000, 11);
  // terminal value ~ N(mu, sigma^2)
  std::vector<double> terminal(S.n_paths);
  for (std::size_t p = 0; p < S.n_paths; ++p)
    terminal[p] = S.value(p, S.cols() - 1);
  double m = mean(terminal);
  double v = sample_variance(terminal);
  CHECK(std::fabs(m - 0.5) < 3.5 * 2.0 / std::sqrt(40000.0));
  CHECK(std::fabs(v - 4.0) < 0.2);
  for (std::size_t p = 0; p < S.n_paths; ++p) CHECK(S.value(p, 0) == 0.0);
}

TEST_CASE("ou paths follow the exact stationary-step law") {
  double theta = 2.0, sigma = 1.5;
  auto model = ModelDescriptor::ornstein_uhlenbeck(theta, sigma);
  PathEnsemble S = simulate(model, 4, 60000, 21);
  // X_{t+d} | X_t = x is N(x e^{-theta d}, sigma^2 (1-e^{-2 theta d})/(2 theta));
  // from X_0 = 0 the time-t variance follows the same formula with d = t
  double t = 1.0;
  double vt = sigma * sigma * (1.0 - std::exp(-2.0 * theta * t)) / (2.0 * theta);
  double vemp = empirical_cov(S, S.cols() - 1, S.cols() - 1);
  CHECK(std::fabs(vemp - vt) < 0.03);
  // lag covariance: cov(X_s, X_t) = var(X_s) e^{-theta (t-s)}
  double s = 0.5;
  std::size_t is = (S.cols() - 1) / 2;
  double vs = sigma * sigma * (1.0 - std::exp(-2.0 * theta * s)) / (2.0 * theta);
  CHECK(std::fabs(empirical_cov(S, is, S.cols() - 1) -
                  vs * std::exp(-theta * (t - s))) < 0.03);
}

TEST_CASE("compensated poisson is centered with variance rate*t") {
  auto model = ModelDescriptor::compensated_poisson(6.0);
  PathEnsemble S = simulate(model, 6, 50000, 31);
  std::vector<double> terminal(S.n_paths);
  for (std::size_t p = 0; p < S.n_paths; ++p)
    terminal[p] = S.value(p, S.cols() - 1);
  CHECK(std::fabs(mean(terminal)) < 3.5 * std::sqrt(6.0 / 50000.0));
  CHECK(std::fabs(sample_variance(terminal) - 6.0) < 0.15);
}

TEST_CASE("deterministic models tabulate the registry function") {
  auto model = ModelDescriptor::deterministic("quadratic");
  PathEnsemble S = simulate(model, 5, 3, 1);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t i = 0; i < S.cols(); ++i) {
      double t = S.grid.time(i);
      CHECK(S.value(p, i) == t * t);
    }
}

TEST_CASE("squared brownian squares a brownian path") {
  auto model = ModelDescriptor::squared_brownian();
  PathEnsemble S = simulate(model, 6, 20000, 77);
  std::vector<double> terminal(S.n_paths);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    terminal[p] = S.value(p, S.cols() - 1);
    CHECK(S.value(p, 0) == 0.0);
    for (std::size_t i = 0; i < S.cols(); ++i) CHECK(S.value(p, i) >= 0.0);
  }
  CHECK(std::fabs(mean(terminal) - 1.0) < 0.04);  // E W_1^2 = 1
}

TEST_CASE("circulant embedding eigenvalues are positive for our hurst range") {
  for (double h : {0.25, 0.5, 0.6, 0.75, 0.9}) {
    auto lam = fgn_embedding_eigenvalues(h, 6);
    REQUIRE(!lam.empty());
    for (double l : lam) CHECK(l > 0.0);
  }
}

TEST_CASE("fbm ensembles reproduce the covariance function") {
  // every sampled covariance entry must sit within 5 standard errors
  for (double h : {0.25, 0.75}) {
    auto model = ModelDescriptor::fractional_brownian(h);
    PathEnsemble S = simulate(model, 5, 100000, 13);
    CHECK(S.synthesis == "circulant");
    for (std::size_t i = 8; i < S.cols(); i += 8) {
      for (std::size_t j = i; j < S.cols(); j += 8) {
        double want = fbm_covariance(h, S.grid.time(i), S.grid.time(j));
        double got = empirical_cov(S, i, j);
        // var of sample cov of joint gaussians ~ (c_ii c_jj + c_ij^2)/N
        double cii = fbm_covariance(h, S.grid.time(i), S.grid.time(i));
        double cjj = fbm_covariance(h, S.grid.time(j), S.grid.time(j));
        double se = std::sqrt((cii * cjj + want * want) / 100000.0);
        CHECK(std::fabs(got - want) < 5.0 * se);
      }
    }
  }
}

TEST_CASE("cholesky fallback matches the covariance too") {
  SimulateOptions opt;
  opt.fbm_method = SimulateOptions::FbmMethod::Cholesky;
  auto model = ModelDescriptor::fractional_brownian(0.75);
  PathEnsemble S = simulate(model, 4, 60000, 17, opt);
  CHECK(S.synthesis == "cholesky");
  for (std::size_t i = 4; i < S.cols(); i += 4)
    for (std::size_t j = i; j < S.cols(); j += 4) {
      double want = fbm_covariance(0.75, S.grid.time(i), S.grid.time(j));
      double got = empirical_cov(S, i, j);
      double cii = fbm_covariance(0.75, S.grid.time(i), S.grid.time(i));
      double cjj = fbm_covariance(0.75, S.grid.time(j), S.grid.time(j));
      double se = std::sqrt((cii * cjj + want * want) / 60000.0);
      CHECK(std::fabs(got - want) < 5.0 * se);
    }
  // refused where the dense factorization would be abusive
  CHECK_THROWS_AS(simulate(model, 13, 10, 1, opt), std::length_error);
}

TEST_CASE("truncation clamps through tanh and keeps the bound") {
  auto inner = ModelDescriptor::brownian(0.0, 3.0);
  auto model = ModelDescriptor::truncated(inner, 0.5);
  PathEnsemble S = simulate(model, 6, 5000, 41);
  double worst = 0.0;
  for (double v : S.data) worst = std::max(worst, std::fabs(v));
  // tanh saturates to 1.0 in double for large inner values, so the clamp
  // can land exactly on the bound
  CHECK(worst <= 0.5);
  CHECK(worst > 0.45);  // sigma=3 pushes hard against the bound
  CHECK(S.synthesis.find("tanh") != std::string::npos);

  // the truncated path is the image of the inner path, so signs agree
  PathEnsemble inner_s = simulate(inner, 6, 5000, 41);
  for (std::size_t p = 0; p < 40; ++p)
    for (std::size_t i = 0; i < S.cols(); ++i) {
      double a = S.value(p, i), b = inner_s.value(p, i);
      CHECK(a == 0.5 * std::tanh(b / 0.5));
    }
}

TEST_CASE("derived and stopped models refuse direct simulation") {
  CHECK_THROWS_AS(simulate(ModelDescriptor::derived("x"), 4, 10, 1),
                  std::invalid_argument);
}
