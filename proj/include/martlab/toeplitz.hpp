#ifndef MARTLAB_TOEPLITZ_HPP
#define MARTLAB_TOEPLITZ_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace martlab {

// Solutions of the symmetric Toeplitz systems T_m x = y[0..m-1] for a fixed
// right-hand-side sequence, captured at the requested sizes. T_{ij} =
// r[|i-j|]. Solved by the Levinson recursion in O(max_size^2) total.
//
// Rows are stored in one arena; row k is the solution at sizes[k], with
// solution entry j multiplying the history sample whose cross-covariance
// with the target is y[j].
struct ToeplitzSnapshots {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> offsets;
  std::vector<double> arena;
  std::vector<double> explained;  // sum_j y_j x_j per snapshot

  std::span<const double> row(std::size_t k) const {
    return {arena.data() + offsets[k], sizes[k]};
  }
};

// sizes must be strictly increasing and each <= min(r.size(), y.size());
// throws std::runtime_error if the system degenerates numerically.
ToeplitzSnapshots levinson_snapshots(std::span<const double> r,
                                     std::span<const double> y,
                                     const std::vector<std::size_t>& sizes);

// dense Gaussian elimination with partial pivoting on the full Toeplitz
// matrix; O(m^3) reference used to validate the recursion
std::vector<double> toeplitz_solve_dense(std::span<const double> r,
                                         std::span<const double> y,
                                         std::size_t m);

}  // namespace martlab

#endif
