#ifndef MARTLAB_INTEGRAND_HPP
#define MARTLAB_INTEGRAND_HPP

#include <functional>
#include <string>
#include <vector>

#include "martlab/ensemble.hpp"
#include "martlab/stopping.hpp"

namespace martlab {

// measurability tag for elementary coefficients: the coefficient paid on
// cell (t_i, t_{i+1}] is known at t_i (LagZero) or already at t_{i-1}
// (LagOne). LagOne is what the shifted / adversarial constructions produce.
enum class CoeffLag { LagZero, LagOne };

// H = sum_i coeff_i 1_{(t_i, t_{i+1}]} on D_level, one coefficient row per
// path. coeff is row-major n_paths x 2^level.
struct ElementaryIntegrand {
  int level = 0;
  CoeffLag lag = CoeffLag::LagZero;
  double declared_bound = 1.0;
  std::size_t n_paths = 0;
  std::vector<double> coeff;

  std::size_t cells() const { return std::size_t{1} << level; }
  double at(std::size_t p, std::size_t i) const {
    return coeff[p * cells() + i];
  }
  double& at(std::size_t p, std::size_t i) { return coeff[p * cells() + i]; }
  void check() const;
};

// H = sum_k values_k 1_{(tau_k, tau_{k+1}]} with stopping-time breakpoints.
// taus has k+1 entries (pathwise non-decreasing, inf allowed), values has k.
struct SimpleIntegrand {
  double declared_bound = 1.0;
  std::vector<StoppingTimeVector> taus;
  std::vector<std::vector<double>> values;

  std::size_t n_pieces() const { return values.size(); }
  void check() const;
};

double sup_norm(const ElementaryIntegrand& h);
double sup_norm(const SimpleIntegrand& h);

// terminal stochastic integrals (H . S)_1, one value per path
std::vector<double> integrate(const PathEnsemble& S,
                              const ElementaryIntegrand& h);
std::vector<double> integrate(const PathEnsemble& S, const SimpleIntegrand& h);

// the running integral t -> (H . S)_t tabulated on S's grid
PathEnsemble integral_process(const PathEnsemble& S,
                              const ElementaryIntegrand& h);
PathEnsemble integral_process(const PathEnsemble& S, const SimpleIntegrand& h);

// A pathwise-tabulated continuous adapted process K; eval(S, p, i) returns
// K at fine grid index i of path p. Used for Riemann sums.
struct TabulatedProcess {
  std::string name;
  double sup_bound = 1.0;
  std::function<double(const PathEnsemble&, std::size_t, std::size_t)> eval;
};

TabulatedProcess k_constant(double c);
TabulatedProcess k_identity();     // K_t = S_t
TabulatedProcess k_exp_neg_sq();   // K_t = exp(-S_t^2)
TabulatedProcess k_time();         // K_t = t
// piecewise-affine process whose node values are the sign of the fine-grid
// increment ending `lag` cells back; the divergence witness for rough paths
TabulatedProcess k_interp_lagged_sign(int lag = 2);

// left-endpoint Riemann sum of K dS along D_level, one value per path
std::vector<double> riemann_sum(const PathEnsemble& S,
                                const TabulatedProcess& K, int level);

// freeze K at left endpoints of D_level cells; riemann_sum(S, K, n) equals
// integrate(S, discretize(S, K, n)) bit for bit
ElementaryIntegrand discretize(const PathEnsemble& S,
                               const TabulatedProcess& K, int level);

// re-express a simple integrand on D_level by pushing each breakpoint to
// sigma = min(1, (floor(tau * 2^level) + 2) / 2^level); the result is
// lag-one measurable
ElementaryIntegrand shift_to_elementary(const SimpleIntegrand& h, int level);

// H^i = sign(S_{(i-lag+1)h} - S_{(i-lag)h}) on D_level, zero for i < lag
ElementaryIntegrand lagged_sign_integrand(const PathEnsemble& S, int level,
                                          int lag);

// zero every cell at or after rho (cell i survives iff t_{i+1} <= rho);
// integrating the gated integrand against S equals integrating h against
// the stopped ensemble
ElementaryIntegrand gate_by_stopping(const ElementaryIntegrand& h,
                                     const StoppingTimeVector& rho);

}  // namespace martlab

#endif
