#ifndef MARTLAB_MINNORM_HPP
#define MARTLAB_MINNORM_HPP

#include <cstddef>
#include <vector>

namespace martlab {

// minimize ||sum_k w_k v_k||^2 over the probability simplex. The gap field
// is the Frank-Wolfe duality certificate: objective - optimum <= gap.
struct MinNormResult {
  std::vector<double> weights;
  double objective = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
};

MinNormResult min_norm_convex(const std::vector<std::vector<double>>& vectors,
                              double tol = 1e-8,
                              std::size_t max_iter = 200000);

// exhaustive simplex grid scan (step `grid_step`), up to 3 vectors; test
// reference for the solver above
double min_norm_brute_force(const std::vector<std::vector<double>>& vectors,
                            double grid_step);

}  // namespace martlab

#endif
