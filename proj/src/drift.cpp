#include "martlab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "martlab/gauss_hermite.hpp"
#include "martlab/stopping.hpp"
#include "martlab/toeplitz.hpp"

namespace martlab {

DriftOracle DriftOracle::exact_for(const ModelDescriptor& m) {
  if (!m.has_exact_drift_oracle())
    throw std::invalid_argument(
        "model '" + m.label() +
        "' has no closed-form drift; use the kernel-regression oracle");
  return DriftOracle{Kind::Exact, 0.0};
}

DriftOracle DriftOracle::kernel(double bandwidth) {
  if (bandwidth < 0.0)
    throw std::invalid_argument("bandwidth must be >= 0 (0 = Silverman)");
  return DriftOracle{Kind::KernelRegression, bandwidth};
}

std::string DriftOracle::name() const {
  return kind == Kind::Exact ? "exact" : "kernel-regression";
}

namespace {

const GaussHermiteRule& gh_rule() {
  static const GaussHermiteRule rule = gauss_hermite(32);
  return rule;
}

// ------------------------ truncation transfer table ------------------------

// G(z) = E[b tanh(X/b)], X ~ N(z, v), tabulated on a uniform z-grid with
// 4-point cubic interpolation; absolute error ~1e-10 at the default spacing
class TanhMeanTable {
 public:
  TanhMeanTable(double zlo, double zhi, double v, double b) : v_(v), b_(b) {
    const double span = std::max(zhi - zlo, 1e-6 * b);
    double dz = 0.004 * b;
    auto n = static_cast<std::size_t>(span / dz) + 8;
    n = std::clamp<std::size_t>(n, 64, 200000);
    // pad two cells either side for the interpolation stencil
    dz = span / static_cast<double>(n - 7);
    zlo_ = zlo - 3.0 * dz;
    dz_ = dz;
    inv_dz_ = 1.0 / dz;
    g_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      g_[k] = tanh_gaussian_mean(zlo_ + dz_ * static_cast<double>(k), v_, b_,
                                 gh_rule());
  }

  double operator()(double z) const {
    double u = (z - zlo_) * inv_dz_;
    auto k = static_cast<long long>(u);
    if (k < 1 || k + 2 >= static_cast<long long>(g_.size()))
      return tanh_gaussian_mean(z, v_, b_, gh_rule());  // off-table fallback
    double t = u - static_cast<double>(k);
    const double* gk = g_.data() + (k - 1);
    double wm1 = -t * (t - 1.0) * (t - 2.0) * (1.0 / 6.0);
    double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) * 0.5;
    double w1 = -(t + 1.0) * t * (t - 2.0) * 0.5;
    double w2 = (t + 1.0) * t * (t - 1.0) * (1.0 / 6.0);
    return wm1 * gk[0] + w0 * gk[1] + w1 * gk[2] + w2 * gk[3];
  }

 private:
  double zlo_ = 0.0, dz_ = 1.0, inv_dz_ = 1.0, v_ = 0.0, b_ = 1.0;
  std::vector<double> g_;
};

// ------------------------ fractional predictive law ------------------------

// Predictive mean of the sum of the next h inner increments given the whole
// fine history, for every path and every cell of D_level. Output is
// column-major mean[q * n_paths + p] (cell-contiguous); var[q] is the
// physical predictive variance of that sum.
struct ColumnPredictive {
  std::vector<double> mean;
  std::vector<double> var;
};

ColumnPredictive fbm_column_predictive(const double* vals, std::size_t n_paths,
                                       std::size_t cols, int fine_level,
                                       double hurst, int level) {
  const std::size_t L = cols - 1;
  const std::size_t h = std::size_t{1} << (fine_level - level);
  const std::size_t cells = std::size_t{1} << level;
  const double dt = std::ldexp(1.0, -fine_level);
  const double phys = std::pow(dt, 2.0 * hurst);

  ColumnPredictive out;
  out.mean.assign(cells * n_paths, 0.0);
  out.var.assign(cells, 0.0);
  out.var[0] = phys * std::pow(static_cast<double>(h), 2.0 * hurst);
  if (cells == 1) return out;

  // unit-spacing covariances; the physical scale cancels in the coefficients
  std::vector<double> r(L + 1);
  for (std::size_t k = 0; k <= L; ++k)
    r[k] = fgn_autocov(hurst, static_cast<long>(k));
  // y[i] = Cov(target, i-th most recent increment) = sum_{k=1..h} r[k+i]
  std::vector<double> y(L, 0.0);
  {
    double acc = 0.0;
    for (std::size_t k = 1; k <= h; ++k) acc += r[k];
    y[0] = acc;
    for (std::size_t i = 1; i < L; ++i) {
      acc += r[i + h] - r[i];
      y[i] = acc;
    }
  }
  std::vector<std::size_t> sizes(cells - 1);
  for (std::size_t q = 1; q < cells; ++q) sizes[q - 1] = q * h;
  ToeplitzSnapshots snaps = levinson_snapshots(r, y, sizes);
  // recent-first -> time order, so the per-path dot runs forward
  for (std::size_t k = 0; k < snaps.sizes.size(); ++k) {
    double* row = snaps.arena.data() + snaps.offsets[k];
    std::reverse(row, row + snaps.sizes[k]);
  }
  const double target_var = std::pow(static_cast<double>(h), 2.0 * hurst);
  for (std::size_t q = 1; q < cells; ++q)
    out.var[q] = phys * (target_var - snaps.explained[q - 1]);

  // blocked dot products: keep a block of increment rows hot and stream
  // each coefficient row across it once
  const std::size_t block =
      std::clamp<std::size_t>((std::size_t{1} << 17) / L, 4, 64);
  const auto n_blocks =
      static_cast<long long>((n_paths + block - 1) / block);
#pragma omp parallel for schedule(static)
  for (long long bi = 0; bi < n_blocks; ++bi) {
    const std::size_t p0 = static_cast<std::size_t>(bi) * block;
    const std::size_t pb = std::min(block, n_paths - p0);
    std::vector<double> inc(pb * L);
    for (std::size_t p = 0; p < pb; ++p) {
      const double* row = vals + (p0 + p) * cols;
      double* dst = inc.data() + p * L;
      for (std::size_t j = 0; j < L; ++j) dst[j] = row[j + 1] - row[j];
    }
    for (std::size_t q = 1; q < cells; ++q) {
      const auto coef = snaps.row(q - 1);
      double* mcol = out.mean.data() + q * n_paths + p0;
      for (std::size_t p = 0; p < pb; ++p) {
        const double* ip = inc.data() + p * L;
        double acc = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) acc += coef[j] * ip[j];
        mcol[p] = acc;
      }
    }
  }
  return out;
}

// blocked [q][p] -> [p][q] transpose
void transpose_into(const std::vector<double>& qp, std::size_t n_paths,
                    std::size_t cells, std::vector<double>& pq) {
  pq.resize(n_paths * cells);
  constexpr std::size_t T = 64;
  for (std::size_t q0 = 0; q0 < cells; q0 += T)
    for (std::size_t p0 = 0; p0 < n_paths; p0 += T) {
      const std::size_t q1 = std::min(q0 + T, cells);
      const std::size_t p1 = std::min(p0 + T, n_paths);
      for (std::size_t q = q0; q < q1; ++q)
        for (std::size_t p = p0; p < p1; ++p)
          pq[p * cells + q] = qp[q * n_paths + p];
    }
}

// values of S at the cell left endpoints, cell-contiguous
std::vector<double> cell_values_qp(const double* vals, std::size_t n_paths,
                                   std::size_t cols, std::size_t h,
                                   std::size_t cells) {
  std::vector<double> out(cells * n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const double* row = vals + p * cols;
    for (std::size_t q = 0; q < cells; ++q)
      out[q * n_paths + p] = row[q * h];
  }
  return out;
}

const double* truncation_inner_values(const PathEnsemble& S, double bound,
                                      DriftCache* cache,
                                      std::vector<double>& scratch) {
  std::vector<double>* dst = &scratch;
  if (cache) {
    if (cache->bound != &S) {
      cache->bound = &S;
      cache->has_inner = false;
    }
    if (cache->has_inner) return cache->inner_values.data();
    dst = &cache->inner_values;
  }
  dst->resize(S.data.size());
  const double b = bound;
  bool saturated = false;
#pragma omp parallel for schedule(static) reduction(|| : saturated)
  for (long long i = 0; i < static_cast<long long>(S.data.size()); ++i) {
    double u = S.data[static_cast<std::size_t>(i)] / b;
    if (!(std::fabs(u) < 1.0 - 1e-14)) {
      saturated = true;
      u = 0.0;
    }
    (*dst)[static_cast<std::size_t>(i)] = b * std::atanh(u);
  }
  if (saturated)
    throw std::domain_error(
        "value saturates the truncation bound; cannot unwrap history");
  if (cache) cache->has_inner = true;
  return dst->data();
}

DriftMatrix exact_matrix(const PathEnsemble& S, const ModelDescriptor& model,
                         int level, DriftCache* cache);

// drift of a stopped model: inner drift gated by {t_q < rho}; exact only
// when rho lands on the evaluation grid (or never stops)
DriftMatrix stopped_matrix(const PathEnsemble& S, const ModelDescriptor& model,
                           int level, DriftCache* cache) {
  DriftMatrix m = exact_matrix(S, *model.inner, level, cache);
  const StoppingTimeVector& rho = *model.stop_at;
  const std::size_t h = sub_step(S.grid, level);
  const auto hh = static_cast<std::int64_t>(h);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    if (rho.is_inf(p)) continue;
    const std::int64_t i = rho.idx[p];
    if (i % hh != 0)
      throw std::invalid_argument(
          "stopping time falls inside a cell of the evaluation grid; the "
          "one-step drift there has no closed form (evaluate on the "
          "stopping grid, or gate explicitly)");
    const auto cut = static_cast<std::size_t>(i / hh);
    for (std::size_t q = cut; q < m.cells(); ++q) m.at(p, q) = 0.0;
  }
  return m;
}

DriftMatrix exact_matrix(const PathEnsemble& S, const ModelDescriptor& model,
                         int level, DriftCache* cache) {
  const std::size_t h = sub_step(S.grid, level);
  const std::size_t cells = std::size_t{1} << level;
  const double step = std::ldexp(1.0, -level);
  DriftMatrix m;
  m.level = level;
  m.n_paths = S.n_paths;

  switch (model.kind) {
    case ModelKind::BrownianMotion:
      m.d.assign(S.n_paths * cells, model.mu * step);
      return m;
    case ModelKind::SquaredBrownianMotion:
      // W_t^2 - t is a martingale, so the compensator gains exactly dt
      m.d.assign(S.n_paths * cells, step);
      return m;
    case ModelKind::CompensatedPoisson:
      m.d.assign(S.n_paths * cells, 0.0);
      return m;
    case ModelKind::OrnsteinUhlenbeck: {
      m.d.resize(S.n_paths * cells);
      const double decay = std::exp(-model.theta * step) - 1.0;
      for (std::size_t p = 0; p < S.n_paths; ++p)
        for (std::size_t q = 0; q < cells; ++q)
          m.at(p, q) = decay * S.value(p, q * h);
      return m;
    }
    case ModelKind::Deterministic: {
      m.d.resize(S.n_paths * cells);
      for (std::size_t p = 0; p < S.n_paths; ++p)
        for (std::size_t q = 0; q < cells; ++q)
          m.at(p, q) = S.value(p, (q + 1) * h) - S.value(p, q * h);
      return m;
    }
    case ModelKind::FractionalBrownianMotion: {
      ColumnPredictive pred = fbm_column_predictive(
          S.data.data(), S.n_paths, S.cols(), S.grid.level, model.hurst,
          level);
      transpose_into(pred.mean, S.n_paths, cells, m.d);
      return m;
    }
    case ModelKind::BoundedTruncation: {
      const ModelDescriptor& in = *model.inner;
      const double b = model.bound;
      std::vector<double> scratch;
      const double* x = truncation_inner_values(S, b, cache, scratch);
      if (in.kind == ModelKind::BrownianMotion ||
          in.kind == ModelKind::OrnsteinUhlenbeck) {
        // markov inner: predictive law depends on the current value only
        double v, shift, scale;
        if (in.kind == ModelKind::BrownianMotion) {
          v = in.sigma * in.sigma * step;
          shift = in.mu * step;
          scale = 1.0;
        } else {
          const double e = std::exp(-in.theta * step);
          v = in.sigma * in.sigma * (1.0 - e * e) / (2.0 * in.theta);
          shift = 0.0;
          scale = e;
        }
        double zlo = 0.0, zhi = 0.0;
        bool first = true;
        for (std::size_t p = 0; p < S.n_paths; ++p)
          for (std::size_t q = 0; q < cells; ++q) {
            double z = scale * x[p * S.cols() + q * h] + shift;
            if (first || z < zlo) zlo = z;
            if (first || z > zhi) zhi = z;
            first = false;
          }
        TanhMeanTable table(zlo, zhi, v, b);
        m.d.resize(S.n_paths * cells);
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
          const double* xr = x + p * S.cols();
          const double* sr = S.data.data() + p * S.cols();
          double* dr = m.d.data() + p * cells;
          for (std::size_t q = 0; q < cells; ++q)
            dr[q] = table(scale * xr[q * h] + shift) - sr[q * h];
        }
        return m;
      }
      if (in.kind == ModelKind::FractionalBrownianMotion) {
        ColumnPredictive pred = fbm_column_predictive(
            x, S.n_paths, S.cols(), S.grid.level, in.hurst, level);
        std::vector<double> xqp =
            cell_values_qp(x, S.n_paths, S.cols(), h, cells);
        std::vector<double> sqp =
            cell_values_qp(S.data.data(), S.n_paths, S.cols(), h, cells);
        std::vector<double> dqp(cells * S.n_paths);
#pragma omp parallel for schedule(static)
        for (long long q = 0; q < static_cast<long long>(cells); ++q) {
          const double* mc = pred.mean.data() + q * S.n_paths;
          const double* xc = xqp.data() + q * S.n_paths;
          const double* sc = sqp.data() + q * S.n_paths;
          double* dc = dqp.data() + q * S.n_paths;
          double zlo = xc[0] + mc[0], zhi = zlo;
          for (std::size_t p = 1; p < S.n_paths; ++p) {
            double z = xc[p] + mc[p];
            zlo = std::min(zlo, z);
            zhi = std::max(zhi, z);
          }
          TanhMeanTable table(zlo, zhi, pred.var[q], b);
          for (std::size_t p = 0; p < S.n_paths; ++p)
            dc[p] = table(xc[p] + mc[p]) - sc[p];
        }
        transpose_into(dqp, S.n_paths, cells, m.d);
        return m;
      }
      throw std::invalid_argument(
          "truncated '" + in.label() + "' has no closed-form drift");
    }
    case ModelKind::Stopped:
      return stopped_matrix(S, model, level, cache);
    case ModelKind::Derived:
      break;
  }
  throw std::invalid_argument("model '" + model.label() +
                              "' has no closed-form drift");
}

// --------------------------- kernel regression -----------------------------

DriftMatrix kernel_matrix(const PathEnsemble& S, double bandwidth,
                          int level) {
  if (!S.model.is_markov())
    throw std::invalid_argument(
        "kernel-regression drift conditions on the current value only and "
        "needs a markov model; '" +
        S.model.label() + "' is not");
  if (S.n_paths < 2)
    throw std::invalid_argument("kernel regression needs >= 2 paths");
  const std::size_t h = sub_step(S.grid, level);
  const std::size_t cells = std::size_t{1} << level;
  const std::size_t N = S.n_paths;
  DriftMatrix m;
  m.level = level;
  m.n_paths = N;
  m.d.resize(N * cells);

#pragma omp parallel for schedule(static)
  for (long long qq = 0; qq < static_cast<long long>(cells); ++qq) {
    const auto q = static_cast<std::size_t>(qq);
    std::vector<double> x(N), y(N);
    for (std::size_t p = 0; p < N; ++p) {
      x[p] = S.value(p, q * h);
      y[p] = S.value(p, (q + 1) * h) - x[p];
    }
    double sx = 0.0, sxx = 0.0;
    for (double v : x) {
      sx += v;
      sxx += v * v;
    }
    const double nd = static_cast<double>(N);
    double sd2 = std::max(sxx / nd - (sx / nd) * (sx / nd), 0.0);
    double bw = bandwidth > 0.0
                    ? bandwidth
                    : 1.06 * std::sqrt(sd2) * std::pow(nd, -0.2);
    if (!(bw > 0.0)) {
      // degenerate column (all paths agree): plain average
      double my = 0.0;
      for (double v : y) my += v;
      my /= nd;
      for (std::size_t p = 0; p < N; ++p) m.at(p, q) = my;
      continue;
    }
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x[a] < x[b] || (x[a] == x[b] && a < b);
    });
    const double radius = 6.0 * bw;
    const double inv2bw2 = 1.0 / (2.0 * bw * bw);
    std::size_t lo = 0, hi = 0;
    for (std::size_t r = 0; r < N; ++r) {
      const double xc = x[order[r]];
      while (lo < N && x[order[lo]] < xc - radius) ++lo;
      while (hi < N && x[order[hi]] <= xc + radius) ++hi;
      double num = 0.0, den = 0.0;
      for (std::size_t j = lo; j < hi; ++j) {
        const double u = x[order[j]] - xc;
        const double w = std::exp(-u * u * inv2bw2);
        num += w * y[order[j]];
        den += w;
      }
      m.at(order[r], q) = num / den;
    }
  }
  return m;
}

}  // namespace

DriftMatrix conditional_drift_matrix(const PathEnsemble& S,
                                     const DriftOracle& oracle, int level,
                                     DriftCache* cache) {
  S.check_shape();
  sub_step(S.grid, level);  // validates the level
  if (oracle.kind == DriftOracle::Kind::KernelRegression)
    return kernel_matrix(S, oracle.bandwidth, level);
  if (!S.model.has_exact_drift_oracle())
    throw std::invalid_argument(
        "model '" + S.model.label() +
        "' has no closed-form drift; use the kernel-regression oracle");
  return exact_matrix(S, S.model, level, cache);
}

std::vector<double> conditional_drift(const PathEnsemble& S,
                                      const DriftOracle& oracle,
                                      std::size_t cell, DriftCache* cache) {
  DriftMatrix m = conditional_drift_matrix(S, oracle, S.grid.level, cache);
  if (cell >= m.cells()) throw std::invalid_argument("cell out of range");
  std::vector<double> col(S.n_paths);
  for (std::size_t p = 0; p < S.n_paths; ++p) col[p] = m.at(p, cell);
  return col;
}

}  // namespace martlab
