#include "martlab/minnorm.hpp"

#include <cmath>
#include <stdexcept>

namespace martlab {

namespace {

std::vector<double> gram(const std::vector<std::vector<double>>& v) {
  const std::size_t k = v.size();
  const std::size_t d = v.front().size();
  for (const auto& x : v)
    if (x.size() != d)
      throw std::invalid_argument("vectors must share one length");
  std::vector<double> g(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) s += v[i][t] * v[j][t];
      g[i * k + j] = g[j * k + i] = s;
    }
  return g;
}

}  // namespace

MinNormResult min_norm_convex(const std::vector<std::vector<double>>& vectors,
                              double tol, std::size_t max_iter) {
  const std::size_t k = vectors.size();
  if (k == 0) throw std::invalid_argument("need at least one vector");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::vector<double> g = gram(vectors);

  MinNormResult res;
  res.weights.assign(k, 0.0);
  res.weights[0] = 1.0;
  std::vector<double> grad(k);  // 2 G w

  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    double obj = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double gi = 0.0;
      for (std::size_t j = 0; j < k; ++j) gi += g[i * k + j] * res.weights[j];
      grad[i] = 2.0 * gi;
      obj += res.weights[i] * gi;
    }
    res.objective = obj;
    // toward vertex: smallest gradient; away vertex: largest on the support
    std::size_t fw = 0, away = 0;
    bool have_away = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (grad[i] < grad[fw]) fw = i;
      if (res.weights[i] > 1e-300 && (!have_away || grad[i] > grad[away])) {
        away = i;
        have_away = true;
      }
    }
    double wg = 0.0;
    for (std::size_t i = 0; i < k; ++i) wg += res.weights[i] * grad[i];
    res.gap = wg - grad[fw];
    if (res.gap <= tol) break;

    // pairwise step along e_fw - e_away with exact line search
    const double slope = grad[fw] - grad[away];
    const double curv =
        g[fw * k + fw] - 2.0 * g[fw * k + away] + g[away * k + away];
    const double gamma_max = res.weights[away];
    double gamma = gamma_max;
    if (curv > 0.0)
      gamma = std::min(gamma_max, -slope / (2.0 * curv));
    if (!(gamma > 0.0)) gamma = gamma_max;  // degenerate direction: swap mass
    res.weights[fw] += gamma;
    res.weights[away] -= gamma;
    if (res.weights[away] < 0.0) res.weights[away] = 0.0;
  }

  // tidy the simplex representation before handing it out
  double sum = 0.0;
  for (double& w : res.weights) {
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  for (double& w : res.weights) w /= sum;
  return res;
}

double min_norm_brute_force(const std::vector<std::vector<double>>& vectors,
                            double grid_step) {
  const std::size_t k = vectors.size();
  if (k == 0 || k > 3)
    throw std::invalid_argument("brute force covers 1..3 vectors");
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw std::invalid_argument("bad grid step");
  const std::vector<double> g = gram(vectors);
  auto objective = [&](double a, double b, double c) {
    const double w[3] = {a, b, c};
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) s += w[i] * w[j] * g[i * k + j];
    return s;
  };
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  const double h = 1.0 / static_cast<double>(steps);
  double best = objective(1.0, 0.0, 0.0);
  if (k == 1) return best;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double a = static_cast<double>(i) * h;
    if (k == 2) {
      best = std::min(best, objective(a, 1.0 - a, 0.0));
      continue;
    }
    for (std::size_t j = 0; i + j <= steps; ++j) {
      const double b = static_cast<double>(j) * h;
      best = std::min(best, objective(a, b, 1.0 - a - b));
    }
  }
  return best;
}

}  // namespace martlab
