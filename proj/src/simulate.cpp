#include "martlab/simulate.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "martlab/fft.hpp"
#include "martlab/rng.hpp"

namespace martlab {

namespace {

PathEnsemble blank(const ModelDescriptor& model, int level,
                   std::size_t n_paths, std::uint64_t seed,
                   const std::string& synthesis) {
  if (n_paths == 0) throw std::invalid_argument("need at least one path");
  PathEnsemble e;
  e.grid = make_grid(level);
  e.n_paths = n_paths;
  e.model = model;
  e.seed = seed;
  e.synthesis = synthesis;
  e.data.assign(n_paths * e.cols(), 0.0);
  return e;
}

void fill_brownian(PathEnsemble& e, double mu, double sigma) {
  const std::size_t L = e.grid.n_steps();
  const double dt = e.grid.dt();
  const double drift = mu * dt;
  const double vol = sigma * std::sqrt(dt);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(e.n_paths); ++p) {
    Rng rng(e.seed, static_cast<std::uint64_t>(p));
    double s = 0.0;
    double* row = e.data.data() + p * e.cols();
    row[0] = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      s += drift + vol * rng.next_normal();
      row[j + 1] = s;
    }
  }
}

void fill_ou(PathEnsemble& e, double theta, double sigma) {
  const std::size_t L = e.grid.n_steps();
  const double dt = e.grid.dt();
  const double decay = std::exp(-theta * dt);
  const double step_sd =
      sigma * std::sqrt((1.0 - decay * decay) / (2.0 * theta));
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(e.n_paths); ++p) {
    Rng rng(e.seed, static_cast<std::uint64_t>(p));
    double s = 0.0;
    double* row = e.data.data() + p * e.cols();
    row[0] = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      s = decay * s + step_sd * rng.next_normal();
      row[j + 1] = s;
    }
  }
}

void fill_cpois(PathEnsemble& e, double rate) {
  const std::size_t L = e.grid.n_steps();
  const double mean = rate * e.grid.dt();
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(e.n_paths); ++p) {
    Rng rng(e.seed, static_cast<std::uint64_t>(p));
    double s = 0.0;
    double* row = e.data.data() + p * e.cols();
    row[0] = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      s += static_cast<double>(rng.next_poisson(mean)) - mean;
      row[j + 1] = s;
    }
  }
}

void fill_deterministic(PathEnsemble& e, const NamedFunction& fn) {
  const std::size_t cols = e.cols();
  std::vector<double> row(cols);
  for (std::size_t i = 0; i < cols; ++i) row[i] = fn.f(e.grid.time(i));
  for (std::size_t p = 0; p < e.n_paths; ++p)
    std::copy(row.begin(), row.end(), e.data.begin() + p * cols);
}

// ------------------------ fractional Brownian motion ------------------------

std::vector<double> physical_fgn_autocov(double hurst, std::size_t L,
                                         double dt) {
  // gamma(k) * dt^(2H) for k = 0..L
  std::vector<double> g(L + 1);
  double scale = std::pow(dt, 2.0 * hurst);
  for (std::size_t k = 0; k <= L; ++k)
    g[k] = scale * fgn_autocov(hurst, static_cast<long>(k));
  return g;
}

void fill_fbm_circulant(PathEnsemble& e, const std::vector<double>& lambda) {
  const std::size_t L = e.grid.n_steps();
  const std::size_t m = lambda.size();  // 2L
  // per-frequency scales, with the final 1/sqrt(m) folded in
  std::vector<double> scale(m);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    double lam = std::max(lambda[k], 0.0);  // clip tiny negative rounding
    double s = (k == 0 || k == m / 2) ? std::sqrt(lam) : std::sqrt(lam / 2.0);
    scale[k] = s * inv_sqrt_m;
  }
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(e.n_paths); ++p) {
    Rng rng(e.seed, static_cast<std::uint64_t>(p));
    std::vector<std::complex<double>> f(m);
    f[0] = scale[0] * rng.next_normal();
    f[m / 2] = scale[m / 2] * rng.next_normal();
    for (std::size_t k = 1; k < m / 2; ++k) {
      double a = rng.next_normal();
      double b = rng.next_normal();
      f[k] = std::complex<double>(scale[k] * a, scale[k] * b);
      f[m - k] = std::conj(f[k]);
    }
    fft_inplace(f);
    double* row = e.data.data() + p * e.cols();
    double s = 0.0;
    row[0] = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      s += f[j].real();
      row[j + 1] = s;
    }
  }
}

// packed lower-triangular Cholesky of the fGn covariance; row i starts at
// i*(i+1)/2. Quadratic memory, so refused above level 12.
std::vector<double> fgn_cholesky(const std::vector<double>& g, std::size_t L) {
  std::vector<double> c(L * (L + 1) / 2, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return c[i * (i + 1) / 2 + j];
  };
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = g[i - j];
      for (std::size_t k = 0; k < j; ++k) sum -= at(i, k) * at(j, k);
      if (i == j) {
        if (sum <= 0.0)
          throw std::runtime_error("fgn covariance not positive definite");
        at(i, j) = std::sqrt(sum);
      } else {
        at(i, j) = sum / at(j, j);
      }
    }
  }
  return c;
}

void fill_fbm_cholesky(PathEnsemble& e, const std::vector<double>& g) {
  const std::size_t L = e.grid.n_steps();
  if (e.grid.level > 12)
    throw std::length_error(
        "cholesky fbm synthesis refused above level 12 (quadratic memory)");
  const std::vector<double> chol = fgn_cholesky(g, L);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(e.n_paths); ++p) {
    Rng rng(e.seed, static_cast<std::uint64_t>(p));
    std::vector<double> z(L);
    for (std::size_t j = 0; j < L; ++j) z[j] = rng.next_normal();
    double* row = e.data.data() + p * e.cols();
    double s = 0.0;
    row[0] = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      const double* crow = chol.data() + j * (j + 1) / 2;
      double x = 0.0;
      for (std::size_t k = 0; k <= j; ++k) x += crow[k] * z[k];
      s += x;
      row[j + 1] = s;
    }
  }
}

}  // namespace

std::vector<double> fgn_embedding_eigenvalues(double hurst, int level) {
  DyadicGrid grid = make_grid(level);
  const std::size_t L = grid.n_steps();
  std::vector<double> g = physical_fgn_autocov(hurst, L, grid.dt());
  const std::size_t m = 2 * L;
  std::vector<std::complex<double>> c(m);
  for (std::size_t j = 0; j <= L; ++j) c[j] = g[j];
  for (std::size_t j = L + 1; j < m; ++j) c[j] = g[m - j];
  fft_inplace(c);
  std::vector<double> lambda(m);
  for (std::size_t k = 0; k < m; ++k) lambda[k] = c[k].real();
  return lambda;
}

PathEnsemble simulate(const ModelDescriptor& model, int level,
                      std::size_t n_paths, std::uint64_t seed,
                      const SimulateOptions& opt) {
  model.validate();
  switch (model.kind) {
    case ModelKind::BrownianMotion: {
      PathEnsemble e = blank(model, level, n_paths, seed, "recursive");
      fill_brownian(e, model.mu, model.sigma);
      return e;
    }
    case ModelKind::OrnsteinUhlenbeck: {
      PathEnsemble e = blank(model, level, n_paths, seed, "recursive");
      fill_ou(e, model.theta, model.sigma);
      return e;
    }
    case ModelKind::CompensatedPoisson: {
      PathEnsemble e = blank(model, level, n_paths, seed, "recursive");
      fill_cpois(e, model.rate);
      return e;
    }
    case ModelKind::SquaredBrownianMotion: {
      PathEnsemble e = blank(model, level, n_paths, seed, "recursive");
      fill_brownian(e, 0.0, 1.0);
      for (auto& v : e.data) v = v * v;
      return e;
    }
    case ModelKind::Deterministic: {
      PathEnsemble e = blank(model, level, n_paths, seed, "tabulated");
      fill_deterministic(e, named_function(model.func));
      return e;
    }
    case ModelKind::FractionalBrownianMotion: {
      const double H = model.hurst;
      bool use_circulant;
      std::vector<double> lambda;
      if (opt.fbm_method == SimulateOptions::FbmMethod::Cholesky) {
        use_circulant = false;
      } else {
        lambda = fgn_embedding_eigenvalues(H, level);
        double lo = lambda[0], hi = lambda[0];
        for (double v : lambda) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        use_circulant = lo > -1e-9 * hi;
        if (!use_circulant &&
            opt.fbm_method == SimulateOptions::FbmMethod::Circulant)
          throw std::runtime_error(
              "circulant embedding has negative eigenvalues at this level");
      }
      if (use_circulant) {
        PathEnsemble e = blank(model, level, n_paths, seed, "circulant");
        fill_fbm_circulant(e, lambda);
        return e;
      }
      PathEnsemble e = blank(model, level, n_paths, seed, "cholesky");
      DyadicGrid grid = make_grid(level);
      fill_fbm_cholesky(
          e, physical_fgn_autocov(H, grid.n_steps(), grid.dt()));
      return e;
    }
    case ModelKind::BoundedTruncation: {
      PathEnsemble inner = simulate(*model.inner, level, n_paths, seed, opt);
      PathEnsemble e = std::move(inner);
      const double b = model.bound;
      for (auto& v : e.data) v = b * std::tanh(v / b);
      e.model = model;
      e.synthesis += "+tanh";
      return e;
    }
    case ModelKind::Stopped:
    case ModelKind::Derived:
      throw std::invalid_argument(
          "model '" + model.label() +
          "' is an operation output, not directly simulable");
  }
  throw std::logic_error("unreachable model kind");
}

}  // namespace martlab
