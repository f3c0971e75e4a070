#ifndef MARTLAB_STATS_HPP
#define MARTLAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace martlab {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double stderr_of_mean(std::span<const double> x) {
  return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

// order-statistic quantile: smallest x with empirical cdf >= q
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile level must lie in (0,1]");
  auto n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * n));
  if (idx == 0) idx = 1;
  if (idx > sorted.size()) idx = sorted.size();
  return sorted[idx - 1];
}

// half-width of the binomial order-statistic interval around the q-quantile,
// i.e. (x_hi - x_lo)/2 for ranks q*n -/+ sqrt(n q (1-q)), clamped to range
inline double quantile_stderr_sorted(std::span<const double> sorted,
                                     double q) {
  auto n = static_cast<double>(sorted.size());
  double center = q * n;
  double spread = std::sqrt(n * q * (1.0 - q));
  auto clamp_rank = [&](double r) {
    auto i = static_cast<long long>(std::ceil(r));
    if (i < 1) i = 1;
    if (i > static_cast<long long>(sorted.size()))
      i = static_cast<long long>(sorted.size());
    return sorted[static_cast<std::size_t>(i - 1)];
  };
  return 0.5 * (clamp_rank(center + spread) - clamp_rank(center - spread));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ols_fit needs two equal-length samples");
  double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // flat data is a perfect fit of a flat line, not a degenerate one
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

inline std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace martlab

#endif
