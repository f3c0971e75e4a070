#include "martlab/integrand.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace martlab {

void ElementaryIntegrand::check() const {
  if (level < 0 || level > kMaxGridLevel)
    throw std::invalid_argument("integrand level out of range");
  if (coeff.size() != n_paths * cells())
    throw std::invalid_argument("integrand coefficient shape mismatch");
  if (!(declared_bound > 0.0))
    throw std::invalid_argument("integrand bound must be positive");
}

void SimpleIntegrand::check() const {
  if (taus.size() < 2)
    throw std::invalid_argument("simple integrand needs >= 2 breakpoints");
  if (values.size() + 1 != taus.size())
    throw std::invalid_argument(
        "simple integrand needs one value row per piece");
  const std::size_t n = taus.front().n_paths();
  const int level = taus.front().level;
  for (const auto& t : taus) {
    t.check(n);
    if (t.level != level)
      throw std::invalid_argument("breakpoints must share one grid level");
  }
  for (const auto& v : values)
    if (v.size() != n)
      throw std::invalid_argument("value row size mismatch");
  for (std::size_t k = 0; k + 1 < taus.size(); ++k)
    for (std::size_t p = 0; p < n; ++p)
      if (taus[k].idx[p] > taus[k + 1].idx[p])
        throw std::invalid_argument(
            "breakpoints must be pathwise non-decreasing");
}

double sup_norm(const ElementaryIntegrand& h) {
  double m = 0.0;
  for (double v : h.coeff) m = std::max(m, std::fabs(v));
  return m;
}

double sup_norm(const SimpleIntegrand& h) {
  double m = 0.0;
  for (const auto& row : h.values)
    for (double v : row) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> integrate(const PathEnsemble& S,
                              const ElementaryIntegrand& h) {
  h.check();
  if (h.n_paths != S.n_paths)
    throw std::invalid_argument("integrand/ensemble path count mismatch");
  const std::size_t step = sub_step(S.grid, h.level);
  const std::size_t cells = h.cells();
  std::vector<double> out(S.n_paths, 0.0);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
    const double* row = S.data.data() + p * S.cols();
    const double* c = h.coeff.data() + p * cells;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i)
      acc += c[i] * (row[(i + 1) * step] - row[i * step]);
    out[p] = acc;
  }
  return out;
}

namespace {

// value of S at a stopping time, reading inf as "hold to the horizon"
inline double value_at(const PathEnsemble& S, std::size_t p,
                       const StoppingTimeVector& tau, std::size_t step,
                       std::size_t last) {
  if (tau.is_inf(p)) return S.value(p, last);
  auto i = static_cast<std::size_t>(tau.idx[p]) * step;
  return S.value(p, std::min(i, last));
}

}  // namespace

std::vector<double> integrate(const PathEnsemble& S,
                              const SimpleIntegrand& h) {
  h.check();
  if (h.taus.front().n_paths() != S.n_paths)
    throw std::invalid_argument("integrand/ensemble path count mismatch");
  const std::size_t step = sub_step(S.grid, h.taus.front().level);
  const std::size_t last = S.cols() - 1;
  std::vector<double> out(S.n_paths, 0.0);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < h.n_pieces(); ++k)
      acc += h.values[k][p] * (value_at(S, p, h.taus[k + 1], step, last) -
                               value_at(S, p, h.taus[k], step, last));
    out[p] = acc;
  }
  return out;
}

PathEnsemble integral_process(const PathEnsemble& S,
                              const ElementaryIntegrand& h) {
  h.check();
  if (h.n_paths != S.n_paths)
    throw std::invalid_argument("integrand/ensemble path count mismatch");
  const std::size_t step = sub_step(S.grid, h.level);
  PathEnsemble out =
      make_like(S, ModelDescriptor::derived("integral"), "integral");
  const std::size_t cols = S.cols();
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
    const double* row = S.data.data() + p * cols;
    const double* c = h.coeff.data() + p * h.cells();
    double* o = out.data.data() + p * cols;
    double acc = 0.0;
    o[0] = 0.0;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      acc += c[j / step] * (row[j + 1] - row[j]);
      o[j + 1] = acc;
    }
  }
  return out;
}

PathEnsemble integral_process(const PathEnsemble& S,
                              const SimpleIntegrand& h) {
  h.check();
  if (h.taus.front().n_paths() != S.n_paths)
    throw std::invalid_argument("integrand/ensemble path count mismatch");
  const std::size_t step = sub_step(S.grid, h.taus.front().level);
  PathEnsemble out =
      make_like(S, ModelDescriptor::derived("integral"), "integral");
  const std::size_t cols = S.cols();
  const std::size_t K = h.taus.size();
  const auto big = static_cast<std::int64_t>(cols);  // treat inf as past-end
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    std::vector<std::int64_t> a(K);
    for (std::size_t k = 0; k < K; ++k)
      a[k] = h.taus[k].is_inf(p)
                 ? big
                 : h.taus[k].idx[p] * static_cast<std::int64_t>(step);
    const double* row = S.data.data() + p * cols;
    double* o = out.data.data() + p * cols;
    double acc = 0.0;
    o[0] = 0.0;
    std::size_t k = 0;  // pieces with a[k] <= j live at k-1 after the walk
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      while (k < K && a[k] <= static_cast<std::int64_t>(j)) ++k;
      // active piece index is k-1 when 1 <= k <= K-1
      if (k >= 1 && k <= K - 1)
        acc += h.values[k - 1][p] * (row[j + 1] - row[j]);
      o[j + 1] = acc;
    }
  }
  return out;
}

TabulatedProcess k_constant(double c) {
  return {"const(" + std::to_string(c) + ")", std::fabs(c),
          [c](const PathEnsemble&, std::size_t, std::size_t) { return c; }};
}

TabulatedProcess k_identity() {
  return {"identity", std::numeric_limits<double>::infinity(),
          [](const PathEnsemble& S, std::size_t p, std::size_t i) {
            return S.value(p, i);
          }};
}

TabulatedProcess k_exp_neg_sq() {
  return {"exp-neg-sq", 1.0,
          [](const PathEnsemble& S, std::size_t p, std::size_t i) {
            double v = S.value(p, i);
            return std::exp(-v * v);
          }};
}

TabulatedProcess k_time() {
  return {"time", 1.0, [](const PathEnsemble& S, std::size_t, std::size_t i) {
            return S.grid.time(i);
          }};
}

TabulatedProcess k_interp_lagged_sign(int lag) {
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
  return {"interp-lagged-sign(" + std::to_string(lag) + ")", 1.0,
          [lag](const PathEnsemble& S, std::size_t p, std::size_t i) {
            const auto l = static_cast<std::size_t>(lag);
            if (i < l) return 0.0;
            double d = S.value(p, i - l + 1) - S.value(p, i - l);
            return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
          }};
}

std::vector<double> riemann_sum(const PathEnsemble& S,
                                const TabulatedProcess& K, int level) {
  // same loop shape as integrate(discretize(...)) so the two agree exactly
  return integrate(S, discretize(S, K, level));
}

ElementaryIntegrand discretize(const PathEnsemble& S,
                               const TabulatedProcess& K, int level) {
  const std::size_t step = sub_step(S.grid, level);
  ElementaryIntegrand h;
  h.level = level;
  h.lag = CoeffLag::LagZero;
  h.n_paths = S.n_paths;
  h.coeff.resize(S.n_paths * h.cells());
  double b = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p)
    for (std::size_t i = 0; i < h.cells(); ++i) {
      double v = K.eval(S, p, i * step);
      h.at(p, i) = v;
      b = std::max(b, std::fabs(v));
    }
  h.declared_bound = std::max(b, 1e-300);
  return h;
}

ElementaryIntegrand shift_to_elementary(const SimpleIntegrand& h, int level) {
  h.check();
  if (level < 0 || level > kMaxGridLevel)
    throw std::invalid_argument("target level out of range");
  const std::size_t n = h.taus.front().n_paths();
  const int tlevel = h.taus.front().level;
  const std::int64_t cells = std::int64_t{1} << level;

  // sigma index of a breakpoint, as an integer on D_level; inf stays inf
  auto sigma_idx = [&](const StoppingTimeVector& tau,
                       std::size_t p) -> std::int64_t {
    if (tau.is_inf(p)) return cells + 1;
    std::int64_t r = tau.idx[p];
    std::int64_t floor_scaled =
        tlevel <= level ? (r << (level - tlevel)) : (r >> (tlevel - level));
    return std::min(cells, floor_scaled + 2);
  };

  ElementaryIntegrand out;
  out.level = level;
  out.lag = CoeffLag::LagOne;
  out.declared_bound = std::max(sup_norm(h), 1e-300);
  out.n_paths = n;
  out.coeff.assign(n * static_cast<std::size_t>(cells), 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < h.n_pieces(); ++k) {
      std::int64_t lo = sigma_idx(h.taus[k], p);
      std::int64_t hi = std::min(sigma_idx(h.taus[k + 1], p), cells);
      for (std::int64_t i = lo; i < hi; ++i)
        out.at(p, static_cast<std::size_t>(i)) = h.values[k][p];
    }
  }
  return out;
}

ElementaryIntegrand lagged_sign_integrand(const PathEnsemble& S, int level,
                                          int lag) {
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
  const std::size_t step = sub_step(S.grid, level);
  ElementaryIntegrand h;
  h.level = level;
  h.lag = lag == 1 ? CoeffLag::LagZero : CoeffLag::LagOne;
  h.declared_bound = 1.0;
  h.n_paths = S.n_paths;
  h.coeff.assign(S.n_paths * h.cells(), 0.0);
  const auto l = static_cast<std::size_t>(lag);
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
    const double* row = S.data.data() + p * S.cols();
    double* c = h.coeff.data() + p * h.cells();
    for (std::size_t i = l; i < h.cells(); ++i) {
      double d = row[(i - l + 1) * step] - row[(i - l) * step];
      c[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    }
  }
  return h;
}

ElementaryIntegrand gate_by_stopping(const ElementaryIntegrand& h,
                                     const StoppingTimeVector& rho) {
  h.check();
  if (rho.level != h.level)
    throw std::invalid_argument("gate needs rho on the integrand's level");
  rho.check(h.n_paths);
  ElementaryIntegrand out = h;
  for (std::size_t p = 0; p < h.n_paths; ++p) {
    const auto cut = rho.idx[p];
    for (std::size_t i = 0; i < h.cells(); ++i)
      if (static_cast<std::int64_t>(i) >= cut) out.at(p, i) = 0.0;
  }
  return out;
}

}  // namespace martlab
