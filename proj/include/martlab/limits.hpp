#ifndef MARTLAB_LIMITS_HPP
#define MARTLAB_LIMITS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "martlab/drift.hpp"
#include "martlab/integrand.hpp"
#include "martlab/minnorm.hpp"
#include "martlab/stopping.hpp"

namespace martlab {

// E min(1, |X - Y|): metrizes convergence in probability
double ky_fan_distance(std::span<const double> x, std::span<const double> y);

struct ConvergenceThresholds {
  double tau_conv = 0.02;
  double tau_div = 0.2;
};

// Cauchy-in-probability diagnosis of a family of per-path samples indexed
// by grid level. "convergent" when every pairwise distance among the top
// half of the levels stays under tau_conv; "divergent" when the adjacent
// distances there are non-decreasing (within tau_conv slack) and reach
// tau_div; otherwise "inconclusive".
struct ConvergenceReport {
  std::vector<int> levels;
  std::vector<double> dist;  // full symmetric matrix, row-major
  double tau_conv = 0.0, tau_div = 0.0;
  double top_max_pair = 0.0;
  double top_max_adjacent = 0.0;
  std::string verdict;

  double at(std::size_t i, std::size_t j) const {
    return dist[i * levels.size() + j];
  }
};

ConvergenceReport convergence_in_probability(
    const std::vector<int>& levels,
    const std::vector<std::vector<double>>& samples,
    ConvergenceThresholds thr = {});

// convex weights over a window [first, last] of a sequence
struct ConvexWeights {
  std::size_t first = 0, last = 0;
  std::vector<double> weights;
};

// sliding min-norm combinations: window i covers [i, min(i+window, K-1)]
struct MazurResult {
  std::size_t window = 8;
  std::vector<ConvexWeights> windows;
  std::vector<double> combo_norm;  // empirical L2 norm of each combination
  double max_gap = 0.0;            // worst solver certificate
};
MazurResult mazur_sequence(const std::vector<std::vector<double>>& xs,
                           std::size_t window = 8, double tol = 1e-8);

// Collapse a ladder of stopping times into one: per path, each window takes
// the largest time still carrying >= half of the window's weight, and the
// result is the minimum over windows. The half-mass property
// 2 * sum_k w_k 1{rho_k >= tau} >= 1 is asserted as a hard postcondition.
StoppingTimeVector accumulation_stopping_time(
    const std::vector<StoppingTimeVector>& rhos,
    const std::vector<ConvexWeights>& windows, int fine_level);

// ---------------------------- boundedness probe ----------------------------

struct ProbeThresholds {
  double exp_bounded = 0.05;
  double exp_unbounded = 0.15;
  double fit_min = 0.9;
};

struct ProbeLevelStat {
  int level = 0;
  double c_eps = 0.0;  // (1-eps) quantile of the family statistic
  double se = 0.0;     // order-statistic half-width
};

// The family statistic per path is the max over members of the running
// maximum of |(H . S)_t| on D_level; members are unit-ball integrands:
//   lagged-sign-1, lagged-sign-2  sign of an earlier grid increment
//   random-sign                   signs from an auxiliary stream
//   drift-sign                    sign of the exact conditional drift
struct ProbeReport {
  std::string model;
  double epsilon = 0.1;
  std::vector<std::string> family;
  std::vector<ProbeLevelStat> levels;
  double exponent = 0.0;  // OLS slope of log2 c_eps against level
  double fit_r2 = 1.0;
  std::string verdict;  // "bounded" | "unbounded" | "inconclusive"
};

ProbeReport good_integrator_probe(const PathEnsemble& S,
                                  const std::vector<int>& levels,
                                  double epsilon,
                                  std::vector<std::string> family,
                                  std::uint64_t probe_seed,
                                  ProbeThresholds thr = {},
                                  DriftCache* cache = nullptr);

// -------------------------- Riemann-sum diagnosis ---------------------------

struct RiemannReport {
  std::vector<std::string> integrands;
  std::vector<ConvergenceReport> reports;
  std::string verdict;  // "yes" | "no" | "inconclusive"
};
RiemannReport riemann_integrator_test(const PathEnsemble& S,
                                      const std::vector<TabulatedProcess>& ks,
                                      const std::vector<int>& levels,
                                      ConvergenceThresholds thr = {});

// ------------------------------ full pipeline ------------------------------

struct PipelineOptions {
  std::vector<int> levels;
  double epsilon = 0.1;
  std::size_t window = 8;
  std::uint64_t probe_seed = 0x5851f42d4c957f2dULL;
  std::vector<std::string> family = {"lagged-sign-1", "lagged-sign-2",
                                     "random-sign", "drift-sign"};
  double minnorm_tol = 1e-8;
};

struct PipelineLevelRow {
  int level = 0;
  double c_eps = 0.0, c_se = 0.0;  // family quantile: the crossing trigger
  double frac_inf = 0.0, frac_se = 0.0;
  double terminal_mean = 0.0;  // E (H . S) stopped at the crossing
  double var_stopped = 0.0, var_se = 0.0;  // variation gated by the crossing
  double identity_gap = 0.0, identity_se = 0.0;
  double max_terminal = 0.0;  // pathwise certificate, <= c_constant
  bool pass_frac = false, pass_var = false, pass_terminal = false,
       pass_identity = false;
};

struct PipelineReport {
  std::string model;
  double epsilon = 0.0, sup_bound = 0.0;
  double c_quantile = 0.0;  // max trigger across levels
  double c_constant = 0.0;  // c_quantile + 2*sup_bound
  std::vector<std::string> family;
  std::vector<PipelineLevelRow> rows;
  MazurResult mazur;  // over the indicators {crossing happened}
  double frac_acc_inf = 0.0, frac_acc_se = 0.0;
  bool pass_acc = false;  // >= 1 - 3 eps - 3 se
  std::vector<double> var_acc;  // variation gated by the accumulated time
  std::vector<double> var_acc_se;
  std::vector<bool> pass_var_acc;  // <= 2 c_constant + 6 sup_bound + 3 se
  bool pass = false;
};

// Runs the whole construction on one fine ensemble: per level, quantile
// trigger, drift-sign crossing, stopped variation and its identity with the
// stopped integral; then the min-norm accumulation across levels and the
// final variation bound. The model must carry a known sup bound.
PipelineReport theorem1_pipeline(const PathEnsemble& S,
                                 const PipelineOptions& opt);

}  // namespace martlab

#endif
