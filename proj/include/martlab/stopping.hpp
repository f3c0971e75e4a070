#ifndef MARTLAB_STOPPING_HPP
#define MARTLAB_STOPPING_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "martlab/ensemble.hpp"

namespace martlab {

// Per-path stopping time valued on a dyadic grid. Never-stopping paths carry
// the reserved index one past the grid (2^level + 1), printed as "inf".
struct StoppingTimeVector {
  int level = 0;
  std::vector<std::int64_t> idx;

  std::int64_t inf_index() const { return (std::int64_t{1} << level) + 1; }
  std::size_t n_paths() const { return idx.size(); }
  bool is_inf(std::size_t p) const { return idx[p] >= inf_index(); }
  double time(std::size_t p) const {
    return is_inf(p) ? std::numeric_limits<double>::infinity()
                     : std::ldexp(static_cast<double>(idx[p]), -level);
  }
  void check(std::size_t expected_paths) const;  // throws on malformed values
};

StoppingTimeVector constant_stopping(int level, std::size_t n_paths,
                                     std::int64_t index);
StoppingTimeVector never_stopping(int level, std::size_t n_paths);

// First grid time where pred(prefix, i) holds; inf if never. pred sees the
// path values up to and including index i, so any pred is adapted by shape.
StoppingTimeVector first_passage(
    const PathEnsemble& S,
    const std::function<bool(std::span<const double>, std::size_t)>& pred);

// canonical predicates
std::function<bool(std::span<const double>, std::size_t)> hits_above(double c);
std::function<bool(std::span<const double>, std::size_t)> hits_abs_above(
    double c);

// re-express on a finer grid (indices scale by the step ratio)
StoppingTimeVector refine_to(const StoppingTimeVector& rho, int fine_level);
// next grid point of D_coarse at or after rho ("rounding up"); requires
// rho.level >= coarse_level
StoppingTimeVector round_up_to(const StoppingTimeVector& rho,
                               int coarse_level);
// previous grid point of D_coarse at or before rho
StoppingTimeVector round_down_to(const StoppingTimeVector& rho,
                                 int coarse_level);
// pointwise minimum (common level required)
StoppingTimeVector pointwise_min(const StoppingTimeVector& a,
                                 const StoppingTimeVector& b);

// Freeze each path after its stopping time. rho may live on any sub-grid of
// S. Stopping an already-stopped ensemble folds into a single wrapper with
// the pointwise minimum, so stopping is idempotent bit-for-bit.
PathEnsemble stop(const PathEnsemble& S, const StoppingTimeVector& rho);

// Split into a pure-jump part (increments with |dS| >= threshold) and the
// bounded-jump remainder; jumps + residual reproduces S to rounding.
struct JumpSplit {
  PathEnsemble jumps;
  PathEnsemble residual;
  std::size_t n_large = 0;  // total count of extracted increments
};
JumpSplit split_large_jumps(const PathEnsemble& S, double threshold);

}  // namespace martlab

#endif
