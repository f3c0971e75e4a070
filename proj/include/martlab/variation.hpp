#ifndef MARTLAB_VARIATION_HPP
#define MARTLAB_VARIATION_HPP

#include <string>
#include <vector>

#include "martlab/drift.hpp"
#include "martlab/integrand.hpp"
#include "martlab/stopping.hpp"

namespace martlab {

// E sum_q |E[S_{t_{q+1}} - S_{t_q} | F_{t_q}]| over the cells of D_level,
// with a Monte Carlo standard error from the per-path sums
struct MeanVariationEntry {
  int level = 0;
  double estimate = 0.0;
  double stderr_value = 0.0;
  std::string oracle;
  bool stopped = false;
};

struct MeanVariationReport {
  std::string model;
  std::vector<MeanVariationEntry> entries;
  // paired diagnostics of the last refinement step; estimates are reported
  // per level, never extrapolated to a single number
  double tail_delta = 0.0;
  double tail_delta_se = 0.0;
};

std::vector<double> per_path_variation(const PathEnsemble& S,
                                       const DriftOracle& oracle, int level,
                                       DriftCache* cache = nullptr);
MeanVariationEntry mean_variation(const PathEnsemble& S,
                                  const DriftOracle& oracle, int level,
                                  DriftCache* cache = nullptr);
MeanVariationReport mean_variation_levels(const PathEnsemble& S,
                                          const DriftOracle& oracle,
                                          const std::vector<int>& levels,
                                          DriftCache* cache = nullptr);

// variation of the path stopped at the next D_level point >= rho: the cell
// sum gated by {t_q < rho}, which keeps an exact oracle for any rho
std::vector<double> per_path_variation_stopped(const PathEnsemble& S,
                                               const DriftOracle& oracle,
                                               const StoppingTimeVector& rho,
                                               int level,
                                               DriftCache* cache = nullptr);
MeanVariationEntry mean_variation_stopped(const PathEnsemble& S,
                                          const DriftOracle& oracle,
                                          const StoppingTimeVector& rho,
                                          int level,
                                          DriftCache* cache = nullptr);

// the adversarial unit integrand H^q = sign(drift); integrating it against
// S turns mean variation into the expected terminal integral value
ElementaryIntegrand sign_integrand(const PathEnsemble& S,
                                   const DriftOracle& oracle, int level,
                                   DriftCache* cache = nullptr);

// first D_level time where the running integral (H . S) reaches
// C - 2*sup_bound; inf if never. The terminal value of the stopped integral
// stays <= C pathwise whenever sup_bound really bounds |S|.
struct CrossingResult {
  StoppingTimeVector rho;
  std::vector<double> stopped_terminal;
  double trigger = 0.0;
  double max_stopped_terminal = 0.0;
};
CrossingResult bounded_variation_stopping(const PathEnsemble& S,
                                          const ElementaryIntegrand& h,
                                          double c_bound, double sup_bound);

// S = M + A on the ensemble's grid: A accumulates the one-step drifts (so
// each A increment is known one step ahead), M is the residual martingale
struct DoobDecomposition {
  PathEnsemble martingale;
  PathEnsemble compensator;
  double max_recon_err = 0.0;  // max |M + A - S|
};
DoobDecomposition doob_decompose(const PathEnsemble& S,
                                 const DriftOracle& oracle,
                                 DriftCache* cache = nullptr);

// S = Y - Z with the drift split by sign: Y = M + (positive drift sums),
// Z = (negative drift sums); both have non-negative one-step drift
struct RaoDecomposition {
  PathEnsemble y;
  PathEnsemble z;
  double max_recon_err = 0.0;  // max |Y - Z - S|
};
RaoDecomposition rao_decompose(const PathEnsemble& S,
                               const DriftOracle& oracle,
                               DriftCache* cache = nullptr);

// localization: decompositions of S stopped at a non-decreasing ladder of
// stopping times, pasted by telescoping into one decomposition valid up to
// the last rung
struct TelescopePiece {
  StoppingTimeVector sigma;
  DoobDecomposition dec;
};
std::vector<TelescopePiece> make_telescope_pieces(
    const PathEnsemble& S, const std::vector<StoppingTimeVector>& sigmas,
    const DriftOracle& oracle, DriftCache* cache = nullptr);

struct TelescopeResult {
  PathEnsemble martingale;
  PathEnsemble compensator;
  StoppingTimeVector covered;   // region where the paste represents S
  double max_recon_err = 0.0;   // |M + A - S| before `covered`
  double max_drift_zscore = 0.0;  // per-cell |mean dM| / se on the covered region
};
TelescopeResult telescope_paste(const PathEnsemble& S,
                                const std::vector<TelescopePiece>& pieces);

}  // namespace martlab

#endif
