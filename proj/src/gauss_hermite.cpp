#include "martlab/gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace martlab {

namespace {

// symmetric tridiagonal eigensolve, QL with implicit shifts; d = diagonal,
// e = off-diagonal (e[0] unused), z = first-row components of eigenvectors
void tql_first_row(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& z) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (++iter > 50)
          throw std::runtime_error("tridiagonal eigensolve did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && m - l > 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // sort ascending by eigenvalue, carrying the first-row components
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    if (k != i) {
      std::swap(d[i], d[k]);
      std::swap(z[i], z[k]);
    }
  }
}

}  // namespace

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n < 1 || n > 512) throw std::invalid_argument("bad quadrature size");
  std::vector<double> d(n, 0.0), e(n, 0.0), z(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    e[i] = std::sqrt(static_cast<double>(i) / 2.0);
  z[0] = 1.0;
  tql_first_row(d, e, z);
  GaussHermiteRule rule;
  rule.nodes = d;
  rule.weights.resize(n);
  const double total = std::sqrt(3.14159265358979323846264338327950288);
  for (std::size_t i = 0; i < n; ++i)
    rule.weights[i] = total * z[i] * z[i];
  return rule;
}

double tanh_gaussian_mean(double mean, double var, double b,
                          const GaussHermiteRule& rule) {
  if (!(b > 0.0)) throw std::invalid_argument("bound must be positive");
  if (var < 0.0) throw std::invalid_argument("variance must be >= 0");
  if (var == 0.0) return b * std::tanh(mean / b);
  const double s = std::sqrt(2.0 * var);
  const double inv_total = 1.0 / std::sqrt(3.14159265358979323846264338327950288);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * std::tanh((mean + s * rule.nodes[i]) / b);
  return b * inv_total * acc;
}

}  // namespace martlab
