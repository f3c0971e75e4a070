#ifndef MARTLAB_GAUSS_HERMITE_HPP
#define MARTLAB_GAUSS_HERMITE_HPP

#include <cstddef>
#include <vector>

namespace martlab {

// Nodes/weights for integral f(t) exp(-t^2) dt ~ sum w_i f(t_i).
// E[g(N(m, v))] = sum (w_i / sqrt(pi)) g(m + sqrt(2 v) t_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix; deterministic, validated against the
// moment identities in tests. n up to a few hundred is fine.
GaussHermiteRule gauss_hermite(std::size_t n);

// E[b tanh(X / b)] for X ~ N(mean, var), the one-step transition mean of a
// tanh-compressed Gaussian coordinate
double tanh_gaussian_mean(double mean, double var, double b,
                          const GaussHermiteRule& rule);

}  // namespace martlab

#endif
