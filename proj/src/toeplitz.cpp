#include "martlab/toeplitz.hpp"

#include <cmath>
#include <stdexcept>

namespace martlab {

ToeplitzSnapshots levinson_snapshots(std::span<const double> r,
                                     std::span<const double> y,
                                     const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) return {};
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k)
    if (sizes[k] >= sizes[k + 1])
      throw std::invalid_argument("snapshot sizes must be increasing");
  const std::size_t M = sizes.back();
  if (M == 0 || M > r.size() || M > y.size())
    throw std::invalid_argument("snapshot size exceeds given sequences");
  if (!(r[0] > 0.0))
    throw std::runtime_error("toeplitz diagonal must be positive");

  ToeplitzSnapshots out;
  out.sizes = sizes;
  out.offsets.reserve(sizes.size());
  std::size_t total = 0;
  for (std::size_t s : sizes) {
    out.offsets.push_back(total);
    total += s;
  }
  out.arena.resize(total);
  out.explained.resize(sizes.size());

  std::vector<double> x(M), a(M), a_next(M);
  x[0] = y[0] / r[0];
  a[0] = 1.0;
  double err = r[0];
  std::size_t next_snap = 0;

  auto record = [&](std::size_t m) {
    while (next_snap < sizes.size() && sizes[next_snap] == m) {
      double* dst = out.arena.data() + out.offsets[next_snap];
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        dst[j] = x[j];
        dot += y[j] * x[j];
      }
      out.explained[next_snap] = dot;
      ++next_snap;
    }
  };

  record(1);
  for (std::size_t m = 1; m < M; ++m) {
    // Durbin step: extend the prediction-error filter to order m+1
    double beta = 0.0;
    for (std::size_t j = 0; j < m; ++j) beta += a[j] * r[m - j];
    double k = -beta / err;
    a_next[0] = 1.0;
    for (std::size_t j = 1; j < m; ++j) a_next[j] = a[j] + k * a[m - j];
    a_next[m] = k;
    err *= 1.0 - k * k;
    if (!(err > 0.0))
      throw std::runtime_error("toeplitz system numerically singular");
    std::swap(a, a_next);
    // extend the solution: correct along the reversed filter
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += r[m - j] * x[j];
    double mu = (y[m] - s) / err;
    for (std::size_t j = 0; j < m; ++j) x[j] += mu * a[m - j];
    x[m] = mu;
    record(m + 1);
  }
  return out;
}

std::vector<double> toeplitz_solve_dense(std::span<const double> r,
                                         std::span<const double> y,
                                         std::size_t m) {
  if (m == 0 || m > r.size() || m > y.size())
    throw std::invalid_argument("bad dense solve size");
  std::vector<double> A(m * m);
  std::vector<double> b(y.begin(), y.begin() + static_cast<long>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      A[i * m + j] = r[i > j ? i - j : j - i];
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < m; ++i)
      if (std::fabs(A[i * m + col]) > std::fabs(A[piv * m + col])) piv = i;
    if (A[piv * m + col] == 0.0)
      throw std::runtime_error("singular dense system");
    if (piv != col) {
      for (std::size_t j = 0; j < m; ++j)
        std::swap(A[piv * m + j], A[col * m + j]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t i = col + 1; i < m; ++i) {
      double f = A[i * m + col] / A[col * m + col];
      for (std::size_t j = col; j < m; ++j) A[i * m + j] -= f * A[col * m + j];
      b[i] -= f * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < m; ++j) s -= A[ii * m + j] * x[j];
    x[ii] = s / A[ii * m + ii];
  }
  return x;
}

}  // namespace martlab
