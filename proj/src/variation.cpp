#include "martlab/variation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "martlab/stats.hpp"

namespace martlab {

std::vector<double> per_path_variation(const PathEnsemble& S,
                                       const DriftOracle& oracle, int level,
                                       DriftCache* cache) {
  DriftMatrix m = conditional_drift_matrix(S, oracle, level, cache);
  std::vector<double> sums(S.n_paths, 0.0);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const double* row = m.d.data() + p * m.cells();
    double acc = 0.0;
    for (std::size_t q = 0; q < m.cells(); ++q) acc += std::fabs(row[q]);
    sums[p] = acc;
  }
  return sums;
}

MeanVariationEntry mean_variation(const PathEnsemble& S,
                                  const DriftOracle& oracle, int level,
                                  DriftCache* cache) {
  std::vector<double> sums = per_path_variation(S, oracle, level, cache);
  MeanVariationEntry e;
  e.level = level;
  e.estimate = mean(sums);
  e.stderr_value = stderr_of_mean(sums);
  e.oracle = oracle.name();
  return e;
}

MeanVariationReport mean_variation_levels(const PathEnsemble& S,
                                          const DriftOracle& oracle,
                                          const std::vector<int>& levels,
                                          DriftCache* cache) {
  if (levels.empty())
    throw std::invalid_argument("need at least one level");
  MeanVariationReport rep;
  rep.model = S.model.label();
  std::vector<double> prev, cur;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) prev = std::move(cur);
    cur = per_path_variation(S, oracle, levels[i], cache);
    MeanVariationEntry e;
    e.level = levels[i];
    e.estimate = mean(cur);
    e.stderr_value = stderr_of_mean(cur);
    e.oracle = oracle.name();
    rep.entries.push_back(e);
  }
  if (levels.size() >= 2) {
    // paired difference of the last two levels (same paths)
    std::vector<double> diff(cur.size());
    for (std::size_t p = 0; p < cur.size(); ++p) diff[p] = cur[p] - prev[p];
    rep.tail_delta = mean(diff);
    rep.tail_delta_se = stderr_of_mean(diff);
  }
  return rep;
}

std::vector<double> per_path_variation_stopped(const PathEnsemble& S,
                                               const DriftOracle& oracle,
                                               const StoppingTimeVector& rho,
                                               int level, DriftCache* cache) {
  rho.check(S.n_paths);
  if (rho.level > S.grid.level)
    throw std::invalid_argument("rho lives on a finer grid than the data");
  StoppingTimeVector fine = refine_to(rho, S.grid.level);
  DriftMatrix m = conditional_drift_matrix(S, oracle, level, cache);
  const std::size_t h = sub_step(S.grid, level);
  std::vector<double> sums(S.n_paths, 0.0);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const double* row = m.d.data() + p * m.cells();
    const std::int64_t cut = fine.idx[p];  // cell q survives iff q*h < cut
    double acc = 0.0;
    for (std::size_t q = 0; q < m.cells(); ++q) {
      if (static_cast<std::int64_t>(q * h) >= cut) break;
      acc += std::fabs(row[q]);
    }
    sums[p] = acc;
  }
  return sums;
}

MeanVariationEntry mean_variation_stopped(const PathEnsemble& S,
                                          const DriftOracle& oracle,
                                          const StoppingTimeVector& rho,
                                          int level, DriftCache* cache) {
  std::vector<double> sums =
      per_path_variation_stopped(S, oracle, rho, level, cache);
  MeanVariationEntry e;
  e.level = level;
  e.estimate = mean(sums);
  e.stderr_value = stderr_of_mean(sums);
  e.oracle = oracle.name();
  e.stopped = true;
  return e;
}

ElementaryIntegrand sign_integrand(const PathEnsemble& S,
                                   const DriftOracle& oracle, int level,
                                   DriftCache* cache) {
  DriftMatrix m = conditional_drift_matrix(S, oracle, level, cache);
  ElementaryIntegrand h;
  h.level = level;
  h.lag = CoeffLag::LagZero;
  h.declared_bound = 1.0;
  h.n_paths = S.n_paths;
  h.coeff.resize(m.d.size());
  for (std::size_t i = 0; i < m.d.size(); ++i) {
    double v = m.d[i];
    h.coeff[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  }
  return h;
}

CrossingResult bounded_variation_stopping(const PathEnsemble& S,
                                          const ElementaryIntegrand& h,
                                          double c_bound, double sup_bound) {
  h.check();
  if (h.n_paths != S.n_paths)
    throw std::invalid_argument("integrand/ensemble path count mismatch");
  if (!(sup_bound >= 0.0))
    throw std::invalid_argument("sup bound must be >= 0");
  const std::size_t step = sub_step(S.grid, h.level);
  CrossingResult out;
  out.trigger = c_bound - 2.0 * sup_bound;
  out.rho.level = h.level;
  out.rho.idx.assign(S.n_paths, out.rho.inf_index());
  out.stopped_terminal.assign(S.n_paths, 0.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const double* row = S.data.data() + p * S.cols();
    const double* c = h.coeff.data() + p * h.cells();
    double acc = 0.0;
    std::int64_t hit = -1;
    if (acc >= out.trigger) hit = 0;  // can trigger at time zero
    for (std::size_t i = 0; i < h.cells() && hit < 0; ++i) {
      acc += c[i] * (row[(i + 1) * step] - row[i * step]);
      if (acc >= out.trigger) hit = static_cast<std::int64_t>(i) + 1;
    }
    out.rho.idx[p] = hit >= 0 ? hit : out.rho.inf_index();
    out.stopped_terminal[p] = acc;  // value at the hit, or terminal value
    worst = std::max(worst, acc);
  }
  out.max_stopped_terminal = worst;
  return out;
}

DoobDecomposition doob_decompose(const PathEnsemble& S,
                                 const DriftOracle& oracle,
                                 DriftCache* cache) {
  DriftMatrix m = conditional_drift_matrix(S, oracle, S.grid.level, cache);
  DoobDecomposition out;
  out.martingale =
      make_like(S, ModelDescriptor::derived("martingale-part"), "decompose");
  out.compensator =
      make_like(S, ModelDescriptor::derived("compensator-part"), "decompose");
  const std::size_t cols = S.cols();
  double err = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const double* s = S.data.data() + p * cols;
    const double* d = m.d.data() + p * m.cells();
    double* a = out.compensator.data.data() + p * cols;
    double* mm = out.martingale.data.data() + p * cols;
    double acc = 0.0;
    a[0] = 0.0;
    mm[0] = s[0];
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      acc += d[j];
      a[j + 1] = acc;
      mm[j + 1] = s[j + 1] - acc;
      err = std::max(err, std::fabs(mm[j + 1] + a[j + 1] - s[j + 1]));
    }
  }
  out.max_recon_err = err;
  return out;
}

RaoDecomposition rao_decompose(const PathEnsemble& S,
                               const DriftOracle& oracle, DriftCache* cache) {
  DriftMatrix m = conditional_drift_matrix(S, oracle, S.grid.level, cache);
  RaoDecomposition out;
  out.y = make_like(S, ModelDescriptor::derived("rao-y"), "decompose");
  out.z = make_like(S, ModelDescriptor::derived("rao-z"), "decompose");
  const std::size_t cols = S.cols();
  double err = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const double* s = S.data.data() + p * cols;
    const double* d = m.d.data() + p * m.cells();
    double* y = out.y.data.data() + p * cols;
    double* z = out.z.data.data() + p * cols;
    double aneg = 0.0;
    y[0] = s[0];
    z[0] = 0.0;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      aneg += std::max(-d[j], 0.0);
      // martingale part rides on y; z collects the decreasing drift
      y[j + 1] = s[j + 1] + aneg;
      z[j + 1] = aneg;
      err = std::max(err, std::fabs(y[j + 1] - z[j + 1] - s[j + 1]));
    }
  }
  out.max_recon_err = err;
  return out;
}

std::vector<TelescopePiece> make_telescope_pieces(
    const PathEnsemble& S, const std::vector<StoppingTimeVector>& sigmas,
    const DriftOracle& oracle, DriftCache* cache) {
  if (sigmas.empty())
    throw std::invalid_argument("need at least one stopping time");
  std::vector<TelescopePiece> pieces;
  pieces.reserve(sigmas.size());
  for (const auto& sigma : sigmas) {
    TelescopePiece piece;
    piece.sigma = refine_to(sigma, S.grid.level);
    PathEnsemble stopped = stop(S, sigma);
    // the stopped ensemble is a different object; its drift cache is local
    DriftCache local;
    (void)cache;
    piece.dec = doob_decompose(stopped, oracle, &local);
    pieces.push_back(std::move(piece));
  }
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k)
    for (std::size_t p = 0; p < S.n_paths; ++p)
      if (pieces[k].sigma.idx[p] > pieces[k + 1].sigma.idx[p])
        throw std::invalid_argument(
            "stopping times must be pathwise non-decreasing");
  return pieces;
}

TelescopeResult telescope_paste(const PathEnsemble& S,
                                const std::vector<TelescopePiece>& pieces) {
  if (pieces.empty())
    throw std::invalid_argument("need at least one piece");
  for (const auto& piece : pieces) {
    if (piece.dec.martingale.n_paths != S.n_paths ||
        piece.dec.martingale.grid.level != S.grid.level)
      throw std::invalid_argument("piece shape does not match the ensemble");
    piece.sigma.check(S.n_paths);
  }
  TelescopeResult out;
  out.martingale =
      make_like(S, ModelDescriptor::derived("pasted-martingale"), "paste");
  out.compensator =
      make_like(S, ModelDescriptor::derived("pasted-compensator"), "paste");
  out.covered = refine_to(pieces.back().sigma, S.grid.level);

  const std::size_t cols = S.cols();
  // literal telescoping sum: piece_0 + sum_k (piece_k - piece_{k-1})
  out.martingale.data = pieces[0].dec.martingale.data;
  out.compensator.data = pieces[0].dec.compensator.data;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    const auto& mk = pieces[k].dec.martingale.data;
    const auto& mk0 = pieces[k - 1].dec.martingale.data;
    const auto& ak = pieces[k].dec.compensator.data;
    const auto& ak0 = pieces[k - 1].dec.compensator.data;
    for (std::size_t i = 0; i < out.martingale.data.size(); ++i) {
      out.martingale.data[i] += mk[i] - mk0[i];
      out.compensator.data[i] += ak[i] - ak0[i];
    }
  }

  double err = 0.0;
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    const auto last = static_cast<std::int64_t>(cols - 1);
    const auto stop_idx = std::min(out.covered.idx[p], last);
    for (std::int64_t i = 0; i <= stop_idx; ++i) {
      const auto j = p * cols + static_cast<std::size_t>(i);
      err = std::max(err, std::fabs(out.martingale.data[j] +
                                    out.compensator.data[j] - S.data[j]));
    }
  }
  out.max_recon_err = err;

  // distributional check that the pasted martingale part has no drift on
  // the covered region: per fine cell, |mean of gated increments| over se
  double worst_z = 0.0;
  for (std::size_t j = 0; j + 1 < cols; ++j) {
    std::size_t n_live = 0;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t p = 0; p < S.n_paths; ++p) {
      if (static_cast<std::int64_t>(j) >= out.covered.idx[p]) continue;
      const auto base = p * cols + j;
      double d =
          out.martingale.data[base + 1] - out.martingale.data[base];
      sum += d;
      sumsq += d * d;
      ++n_live;
    }
    if (n_live < 2) continue;
    double n = static_cast<double>(n_live);
    double var = std::max(sumsq / n - (sum / n) * (sum / n), 0.0);
    double se = std::sqrt(var / n);
    if (se > 0.0) worst_z = std::max(worst_z, std::fabs(sum / n) / se);
  }
  out.max_drift_zscore = worst_z;
  return out;
}

}  // namespace martlab
