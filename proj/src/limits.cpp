#include "martlab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "martlab/rng.hpp"
#include "martlab/stats.hpp"
#include "martlab/variation.hpp"

namespace martlab {

double ky_fan_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("ky_fan_distance needs equal non-empty samples");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += std::min(1.0, std::fabs(x[i] - y[i]));
  return s / static_cast<double>(x.size());
}

ConvergenceReport convergence_in_probability(
    const std::vector<int>& levels,
    const std::vector<std::vector<double>>& samples,
    ConvergenceThresholds thr) {
  const std::size_t L = levels.size();
  if (L < 3 || samples.size() != L)
    throw std::invalid_argument(
        "convergence diagnosis needs samples at three or more levels");
  for (std::size_t i = 1; i < L; ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("levels must be strictly increasing");
  const std::size_t n = samples[0].size();
  for (const auto& s : samples)
    if (s.size() != n || n == 0)
      throw std::invalid_argument("samples must be non-empty and equal-sized");

  ConvergenceReport rep;
  rep.levels = levels;
  rep.tau_conv = thr.tau_conv;
  rep.tau_div = thr.tau_div;
  rep.dist.assign(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i + 1; j < L; ++j) {
      double d = ky_fan_distance(samples[i], samples[j]);
      rep.dist[i * L + j] = d;
      rep.dist[j * L + i] = d;
    }

  const std::size_t h0 = L / 2;  // the finer half of the levels
  for (std::size_t i = h0; i < L; ++i)
    for (std::size_t j = i + 1; j < L; ++j)
      rep.top_max_pair = std::max(rep.top_max_pair, rep.at(i, j));
  bool nondecreasing = true;
  for (std::size_t i = h0; i + 1 < L; ++i) {
    rep.top_max_adjacent = std::max(rep.top_max_adjacent, rep.at(i, i + 1));
    if (i + 2 < L && rep.at(i + 1, i + 2) < rep.at(i, i + 1) - thr.tau_conv)
      nondecreasing = false;
  }

  if (rep.top_max_pair < thr.tau_conv)
    rep.verdict = "convergent";
  else if (nondecreasing && rep.top_max_adjacent >= thr.tau_div)
    rep.verdict = "divergent";
  else
    rep.verdict = "inconclusive";
  return rep;
}

MazurResult mazur_sequence(const std::vector<std::vector<double>>& xs,
                           std::size_t window, double tol) {
  if (xs.empty()) throw std::invalid_argument("mazur_sequence needs vectors");
  if (window == 0) throw std::invalid_argument("window must be positive");
  const std::size_t dim = xs[0].size();
  for (const auto& v : xs)
    if (v.size() != dim || dim == 0)
      throw std::invalid_argument("vectors must be non-empty and equal-sized");

  MazurResult res;
  res.window = window;
  const std::size_t K = xs.size();
  for (std::size_t i = 0; i < K; ++i) {
    std::size_t last = std::min(i + window, K - 1);
    std::vector<std::vector<double>> sub(xs.begin() + static_cast<long>(i),
                                         xs.begin() + static_cast<long>(last) +
                                             1);
    MinNormResult mn = min_norm_convex(sub, tol);
    res.windows.push_back(ConvexWeights{i, last, mn.weights});
    res.combo_norm.push_back(
        std::sqrt(std::max(0.0, mn.objective) / static_cast<double>(dim)));
    res.max_gap = std::max(res.max_gap, mn.gap);
  }
  return res;
}

StoppingTimeVector accumulation_stopping_time(
    const std::vector<StoppingTimeVector>& rhos,
    const std::vector<ConvexWeights>& windows, int fine_level) {
  if (rhos.empty() || windows.empty())
    throw std::invalid_argument("accumulation needs stopping times and windows");
  const std::size_t N = rhos[0].n_paths();
  std::vector<StoppingTimeVector> fine;
  fine.reserve(rhos.size());
  for (const auto& r : rhos) {
    if (r.n_paths() != N)
      throw std::invalid_argument("stopping times disagree on path count");
    fine.push_back(refine_to(r, fine_level));
  }
  for (const auto& w : windows) {
    if (w.first > w.last || w.last >= rhos.size() ||
        w.weights.size() != w.last - w.first + 1)
      throw std::invalid_argument("window does not fit the stopping ladder");
    double total = 0.0;
    for (double x : w.weights) {
      if (x < -1e-12) throw std::invalid_argument("negative window weight");
      total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw std::invalid_argument("window weights must sum to one");
  }

  StoppingTimeVector acc;
  acc.level = fine_level;
  acc.idx.assign(N, 0);
  const auto inf = acc.inf_index();

  bool broken = false;
#pragma omp parallel for schedule(static) reduction(|| : broken)
  for (std::size_t p = 0; p < N; ++p) {
    std::int64_t best = inf;
    std::vector<std::pair<std::int64_t, double>> items;
    for (const auto& w : windows) {
      items.clear();
      for (std::size_t k = w.first; k <= w.last; ++k)
        items.emplace_back(fine[k].idx[p], w.weights[k - w.first]);
      // largest time still holding at least half of the window's weight
      std::sort(items.begin(), items.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      double mass = 0.0;
      std::int64_t tau = 0;
      bool found = false;
      for (const auto& [t, wt] : items) {
        mass += wt;
        if (mass >= 0.5 - 1e-9) {
          tau = t;
          found = true;
          break;
        }
      }
      if (!found) {
        broken = true;
        tau = 0;
      }
      // the half-mass certificate, rechecked on the suffix at tau itself
      double suffix = 0.0;
      for (const auto& [t, wt] : items)
        if (t >= tau) suffix += wt;
      if (suffix < 0.5 - 1e-6) broken = true;
      best = std::min(best, tau);
    }
    acc.idx[p] = std::min(best, inf);
  }
  if (broken)
    throw std::logic_error(
        "accumulation lost the half-mass property; weights are inconsistent");
  return acc;
}

// ---------------------------- boundedness probe ----------------------------

namespace {

enum class Member { LagSign1, LagSign2, RandomSign, DriftSign };

Member parse_member(const std::string& name) {
  if (name == "lagged-sign-1") return Member::LagSign1;
  if (name == "lagged-sign-2") return Member::LagSign2;
  if (name == "random-sign") return Member::RandomSign;
  if (name == "drift-sign") return Member::DriftSign;
  throw std::invalid_argument("unknown probe family member: " + name);
}

// each fold_* updates stat[p] with max(stat[p], running max of |(H . S)|)

void fold_lag_sign(const PathEnsemble& S, int level, int lag,
                   std::vector<double>& stat) {
  const auto h = sub_step(S.grid, level);
  const auto cells = std::size_t{1} << level;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    auto row = S.path(p);
    double acc = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      double c = 0.0;
      if (i >= static_cast<std::size_t>(lag)) {
        double d = row[(i - lag + 1) * h] - row[(i - lag) * h];
        c = (d > 0.0) - (d < 0.0);
      }
      acc += c * (row[(i + 1) * h] - row[i * h]);
      peak = std::max(peak, std::fabs(acc));
    }
    stat[p] = std::max(stat[p], peak);
  }
}

void fold_random_sign(const PathEnsemble& S, int level, std::uint64_t seed,
                      std::vector<double>& stat) {
  const auto h = sub_step(S.grid, level);
  const auto cells = std::size_t{1} << level;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    auto row = S.path(p);
    Rng g(seed ^ mix64(static_cast<std::uint64_t>(level)), p);
    double acc = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      double c = i == 0 ? 0.0 : ((g.next_u64() & 1u) ? 1.0 : -1.0);
      acc += c * (row[(i + 1) * h] - row[i * h]);
      peak = std::max(peak, std::fabs(acc));
    }
    stat[p] = std::max(stat[p], peak);
  }
}

void fold_sign_coeffs(const PathEnsemble& S, int level,
                      const std::int8_t* sign, std::vector<double>& stat) {
  const auto h = sub_step(S.grid, level);
  const auto cells = std::size_t{1} << level;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    auto row = S.path(p);
    const std::int8_t* c = sign + p * cells;
    double acc = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      acc += static_cast<double>(c[i]) * (row[(i + 1) * h] - row[i * h]);
      peak = std::max(peak, std::fabs(acc));
    }
    stat[p] = std::max(stat[p], peak);
  }
}

void fold_member(const PathEnsemble& S, int level, Member m,
                 std::uint64_t probe_seed, const std::int8_t* drift_sign,
                 DriftCache* cache, std::vector<double>& stat) {
  switch (m) {
    case Member::LagSign1:
      fold_lag_sign(S, level, 1, stat);
      return;
    case Member::LagSign2:
      fold_lag_sign(S, level, 2, stat);
      return;
    case Member::RandomSign:
      fold_random_sign(S, level, probe_seed, stat);
      return;
    case Member::DriftSign: {
      if (drift_sign != nullptr) {
        fold_sign_coeffs(S, level, drift_sign, stat);
        return;
      }
      DriftMatrix dm = conditional_drift_matrix(
          S, DriftOracle::exact_for(S.model), level, cache);
      std::vector<std::int8_t> sgn(dm.d.size());
      for (std::size_t i = 0; i < dm.d.size(); ++i)
        sgn[i] = static_cast<std::int8_t>((dm.d[i] > 0.0) - (dm.d[i] < 0.0));
      fold_sign_coeffs(S, level, sgn.data(), stat);
      return;
    }
  }
  throw std::logic_error("unhandled probe member");
}

std::string fit_verdict(double exponent, double r2, ProbeThresholds thr) {
  if (exponent <= thr.exp_bounded) return "bounded";
  if (exponent >= thr.exp_unbounded && r2 >= thr.fit_min) return "unbounded";
  return "inconclusive";
}

}  // namespace

ProbeReport good_integrator_probe(const PathEnsemble& S,
                                  const std::vector<int>& levels,
                                  double epsilon,
                                  std::vector<std::string> family,
                                  std::uint64_t probe_seed,
                                  ProbeThresholds thr, DriftCache* cache) {
  if (levels.size() < 3)
    throw std::invalid_argument("probe needs at least three levels for a verdict");
  for (int n : levels)
    if (n < 1 || n > S.grid.level)
      throw std::invalid_argument("probe level outside the ensemble grid");
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("probe epsilon must lie in (0, 0.5]");
  if (family.empty()) throw std::invalid_argument("probe family is empty");

  std::vector<Member> members;
  members.reserve(family.size());
  for (const auto& name : family) members.push_back(parse_member(name));

  ProbeReport rep;
  rep.model = S.model.label();
  rep.epsilon = epsilon;
  rep.family = std::move(family);

  std::vector<double> xs, ys;
  std::vector<double> stat;
  for (int n : levels) {
    stat.assign(S.n_paths, 0.0);
    for (Member m : members)
      fold_member(S, n, m, probe_seed, nullptr, cache, stat);
    std::sort(stat.begin(), stat.end());
    ProbeLevelStat row;
    row.level = n;
    row.c_eps = quantile_sorted(stat, 1.0 - epsilon);
    row.se = quantile_stderr_sorted(stat, 1.0 - epsilon);
    rep.levels.push_back(row);
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log2(std::max(row.c_eps, 1e-300)));
  }

  // the growth exponent is an asymptotic quantity, so fit it on the finer
  // half of the levels (the convention the Cauchy verdict also uses); the
  // coarse levels sit on a fluctuation floor that decays instead of growing
  // and would drag the fitted slope toward zero
  const std::size_t skip = std::min(levels.size() / 2, levels.size() - 3);
  LineFit fit = ols_fit(std::span(xs).subspan(skip), std::span(ys).subspan(skip));
  rep.exponent = fit.slope;
  rep.fit_r2 = fit.r2;
  rep.verdict = fit_verdict(rep.exponent, rep.fit_r2, thr);
  return rep;
}

// -------------------------- Riemann-sum diagnosis ---------------------------

RiemannReport riemann_integrator_test(const PathEnsemble& S,
                                      const std::vector<TabulatedProcess>& ks,
                                      const std::vector<int>& levels,
                                      ConvergenceThresholds thr) {
  if (ks.empty()) throw std::invalid_argument("no Riemann integrands given");
  RiemannReport rep;
  bool any_div = false, all_conv = true;
  for (const auto& K : ks) {
    std::vector<std::vector<double>> samples;
    samples.reserve(levels.size());
    for (int n : levels) samples.push_back(riemann_sum(S, K, n));
    ConvergenceReport cr = convergence_in_probability(levels, samples, thr);
    if (cr.verdict == "divergent") any_div = true;
    if (cr.verdict != "convergent") all_conv = false;
    rep.integrands.push_back(K.name);
    rep.reports.push_back(std::move(cr));
  }
  rep.verdict = any_div ? "no" : (all_conv ? "yes" : "inconclusive");
  return rep;
}

// ------------------------------ full pipeline ------------------------------

namespace {

struct LevelArena {
  std::vector<std::int8_t> sign;
  std::vector<float> absd;
};

// variation over D_level cells surviving the gate t_{q+1} <= rho, read from
// the float magnitude arena; rho lives on the ensemble's fine grid
std::vector<double> gated_variation_from_arena(const LevelArena& a, int level,
                                               int fine_level,
                                               const StoppingTimeVector& rho) {
  const auto cells = std::size_t{1} << level;
  const auto h = std::int64_t{1} << (fine_level - level);
  const std::size_t N = rho.n_paths();
  std::vector<double> out(N, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < N; ++p) {
    const float* row = a.absd.data() + p * cells;
    std::int64_t cut = rho.idx[p];  // fine index; cell q needs (q+1)h <= cut
    auto last = static_cast<std::int64_t>(cells);
    std::int64_t limit = std::min(last, cut / h);
    double s = 0.0;
    for (std::int64_t q = 0; q < limit; ++q) s += row[q];
    out[p] = s;
  }
  return out;
}

double binom_se(double frac, std::size_t n) {
  return std::sqrt(std::max(0.0, frac * (1.0 - frac)) /
                   static_cast<double>(n));
}

}  // namespace

PipelineReport theorem1_pipeline(const PathEnsemble& S,
                                 const PipelineOptions& opt) {
  if (opt.levels.empty())
    throw std::invalid_argument("pipeline needs at least one level");
  for (std::size_t i = 0; i < opt.levels.size(); ++i) {
    if (opt.levels[i] < 1 || opt.levels[i] > S.grid.level)
      throw std::invalid_argument("pipeline level outside the ensemble grid");
    if (i > 0 && opt.levels[i] <= opt.levels[i - 1])
      throw std::invalid_argument("pipeline levels must increase");
  }
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0 / 3.0))
    throw std::invalid_argument("pipeline epsilon must lie in (0, 1/3)");
  auto bound = S.model.known_sup_bound();
  if (!bound)
    throw std::invalid_argument(
        "pipeline needs a model with a known sup bound; wrap it in a "
        "truncation first");
  const double b = *bound;
  const std::size_t N = S.n_paths;
  const int fine = S.grid.level;

  std::vector<Member> members;
  for (const auto& name : opt.family) members.push_back(parse_member(name));

  PipelineReport rep;
  rep.model = S.model.label();
  rep.epsilon = opt.epsilon;
  rep.sup_bound = b;
  rep.family = opt.family;

  DriftCache cache;
  DriftOracle oracle = DriftOracle::exact_for(S.model);

  std::vector<LevelArena> arenas(opt.levels.size());
  std::vector<StoppingTimeVector> rhos;
  std::vector<std::vector<double>> indicators;  // 1{crossing happened}

  std::vector<double> stat, diff;
  for (std::size_t li = 0; li < opt.levels.size(); ++li) {
    const int n = opt.levels[li];
    LevelArena& arena = arenas[li];
    {
      DriftMatrix dm = conditional_drift_matrix(S, oracle, n, &cache);
      arena.sign.resize(dm.d.size());
      arena.absd.resize(dm.d.size());
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < dm.d.size(); ++i) {
        double v = dm.d[i];
        arena.sign[i] = static_cast<std::int8_t>((v > 0.0) - (v < 0.0));
        arena.absd[i] = static_cast<float>(std::fabs(v));
      }
    }

    stat.assign(N, 0.0);
    for (Member m : members)
      fold_member(S, n, m, opt.probe_seed, arena.sign.data(), &cache, stat);
    std::sort(stat.begin(), stat.end());

    PipelineLevelRow row;
    row.level = n;
    row.c_eps = quantile_sorted(stat, 1.0 - opt.epsilon);
    row.c_se = quantile_stderr_sorted(stat, 1.0 - opt.epsilon);

    // the adversarial drift-sign integrand, stopped when its running
    // integral reaches the level's own trigger
    ElementaryIntegrand h;
    h.level = n;
    h.lag = CoeffLag::LagZero;
    h.declared_bound = 1.0;
    h.n_paths = N;
    h.coeff.resize(arena.sign.size());
    for (std::size_t i = 0; i < arena.sign.size(); ++i)
      h.coeff[i] = static_cast<double>(arena.sign[i]);
    CrossingResult cr = bounded_variation_stopping(S, h, row.c_eps + 2.0 * b, b);
    h.coeff.clear();
    h.coeff.shrink_to_fit();

    std::size_t n_inf = 0;
    for (std::size_t p = 0; p < N; ++p)
      if (cr.rho.is_inf(p)) ++n_inf;
    row.frac_inf = static_cast<double>(n_inf) / static_cast<double>(N);
    row.frac_se = binom_se(row.frac_inf, N);
    row.terminal_mean = mean(cr.stopped_terminal);
    row.max_terminal = cr.max_stopped_terminal;

    StoppingTimeVector rho_fine = refine_to(cr.rho, fine);
    std::vector<double> gated =
        gated_variation_from_arena(arena, n, fine, rho_fine);
    row.var_stopped = mean(gated);
    row.var_se = stderr_of_mean(gated);

    // E of the stopped integral equals E of the gated variation; check the
    // paired difference against its own Monte Carlo error
    diff.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p)
      diff[p] = cr.stopped_terminal[p] - gated[p];
    row.identity_gap = mean(diff);
    row.identity_se = stderr_of_mean(diff);
    row.pass_identity = std::fabs(row.identity_gap) <=
                        3.0 * row.identity_se + 1e-9 * (1.0 + row.var_stopped);

    row.pass_frac = row.frac_inf >= 1.0 - opt.epsilon - 3.0 * row.frac_se;
    row.pass_terminal =
        row.max_terminal <= row.c_eps + 2.0 * b + 1e-9 * (1.0 + row.c_eps);

    indicators.emplace_back(N, 0.0);
    for (std::size_t p = 0; p < N; ++p)
      indicators.back()[p] = cr.rho.is_inf(p) ? 0.0 : 1.0;
    rhos.push_back(std::move(cr.rho));
    rep.rows.push_back(row);
  }

  rep.c_quantile = 0.0;
  for (const auto& row : rep.rows)
    rep.c_quantile = std::max(rep.c_quantile, row.c_eps);
  rep.c_constant = rep.c_quantile + 2.0 * b;
  for (auto& row : rep.rows)
    row.pass_var = row.var_stopped <=
                   rep.c_constant + 3.0 * row.var_se + 1e-9 * (1.0 + rep.c_constant);

  rep.mazur = mazur_sequence(indicators, opt.window, opt.minnorm_tol);
  StoppingTimeVector acc =
      accumulation_stopping_time(rhos, rep.mazur.windows, fine);

  std::size_t n_inf = 0;
  for (std::size_t p = 0; p < N; ++p)
    if (acc.is_inf(p)) ++n_inf;
  rep.frac_acc_inf = static_cast<double>(n_inf) / static_cast<double>(N);
  rep.frac_acc_se = binom_se(rep.frac_acc_inf, N);
  rep.pass_acc =
      rep.frac_acc_inf >= 1.0 - 3.0 * opt.epsilon - 3.0 * rep.frac_acc_se;

  bool all_acc = true;
  for (std::size_t li = 0; li < opt.levels.size(); ++li) {
    std::vector<double> gated =
        gated_variation_from_arena(arenas[li], opt.levels[li], fine, acc);
    double v = mean(gated), se = stderr_of_mean(gated);
    double cap = 2.0 * rep.c_constant + 6.0 * b;
    bool ok = v <= cap + 3.0 * se + 1e-9 * (1.0 + cap);
    rep.var_acc.push_back(v);
    rep.var_acc_se.push_back(se);
    rep.pass_var_acc.push_back(ok);
    all_acc = all_acc && ok;
  }

  rep.pass = rep.pass_acc && all_acc;
  for (const auto& row : rep.rows)
    rep.pass = rep.pass && row.pass_frac && row.pass_var && row.pass_terminal &&
               row.pass_identity;
  return rep;
}

}  // namespace martlab
