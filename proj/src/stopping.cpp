#include "martlab/stopping.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace martlab {

void StoppingTimeVector::check(std::size_t expected_paths) const {
  if (level < 0 || level > kMaxGridLevel)
    throw std::invalid_argument("stopping vector level out of range");
  if (idx.size() != expected_paths)
    throw std::invalid_argument("stopping vector has " +
                                std::to_string(idx.size()) + " paths, want " +
                                std::to_string(expected_paths));
  const std::int64_t top = inf_index();
  for (std::int64_t v : idx)
    if (v < 0 || v > top)
      throw std::invalid_argument("stopping index " + std::to_string(v) +
                                  " outside [0, 2^level + 1]");
}

StoppingTimeVector constant_stopping(int level, std::size_t n_paths,
                                     std::int64_t index) {
  StoppingTimeVector rho;
  rho.level = level;
  rho.idx.assign(n_paths, index);
  rho.check(n_paths);
  return rho;
}

StoppingTimeVector never_stopping(int level, std::size_t n_paths) {
  StoppingTimeVector rho;
  rho.level = level;
  rho.idx.assign(n_paths, rho.inf_index());
  return rho;
}

StoppingTimeVector first_passage(
    const PathEnsemble& S,
    const std::function<bool(std::span<const double>, std::size_t)>& pred) {
  StoppingTimeVector rho;
  rho.level = S.grid.level;
  rho.idx.assign(S.n_paths, rho.inf_index());
  const std::size_t cols = S.cols();
#pragma omp parallel for schedule(static)
  for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
    auto row = S.path(static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < cols; ++i) {
      if (pred(row.first(i + 1), i)) {
        rho.idx[p] = static_cast<std::int64_t>(i);
        break;
      }
    }
  }
  return rho;
}

std::function<bool(std::span<const double>, std::size_t)> hits_above(
    double c) {
  return [c](std::span<const double> prefix, std::size_t i) {
    return prefix[i] >= c;
  };
}

std::function<bool(std::span<const double>, std::size_t)> hits_abs_above(
    double c) {
  return [c](std::span<const double> prefix, std::size_t i) {
    return std::fabs(prefix[i]) >= c;
  };
}

StoppingTimeVector refine_to(const StoppingTimeVector& rho, int fine_level) {
  if (fine_level < rho.level || fine_level > kMaxGridLevel)
    throw std::invalid_argument("refine_to needs rho.level <= fine <= cap");
  StoppingTimeVector out;
  out.level = fine_level;
  out.idx.resize(rho.idx.size());
  const std::int64_t h = std::int64_t{1} << (fine_level - rho.level);
  for (std::size_t p = 0; p < rho.idx.size(); ++p)
    out.idx[p] = rho.is_inf(p) ? out.inf_index() : rho.idx[p] * h;
  return out;
}

StoppingTimeVector round_up_to(const StoppingTimeVector& rho,
                               int coarse_level) {
  if (coarse_level < 0 || coarse_level > rho.level)
    throw std::invalid_argument("round_up_to needs 0 <= coarse <= rho.level");
  StoppingTimeVector out;
  out.level = coarse_level;
  out.idx.resize(rho.idx.size());
  const std::int64_t h = std::int64_t{1} << (rho.level - coarse_level);
  for (std::size_t p = 0; p < rho.idx.size(); ++p)
    out.idx[p] = rho.is_inf(p) ? out.inf_index() : (rho.idx[p] + h - 1) / h;
  return out;
}

StoppingTimeVector round_down_to(const StoppingTimeVector& rho,
                                 int coarse_level) {
  if (coarse_level < 0 || coarse_level > rho.level)
    throw std::invalid_argument(
        "round_down_to needs 0 <= coarse <= rho.level");
  StoppingTimeVector out;
  out.level = coarse_level;
  out.idx.resize(rho.idx.size());
  const std::int64_t h = std::int64_t{1} << (rho.level - coarse_level);
  for (std::size_t p = 0; p < rho.idx.size(); ++p)
    out.idx[p] = rho.is_inf(p) ? out.inf_index() : rho.idx[p] / h;
  return out;
}

StoppingTimeVector pointwise_min(const StoppingTimeVector& a,
                                 const StoppingTimeVector& b) {
  if (a.level != b.level || a.idx.size() != b.idx.size())
    throw std::invalid_argument("pointwise_min needs matching shape");
  StoppingTimeVector out = a;
  for (std::size_t p = 0; p < a.idx.size(); ++p)
    out.idx[p] = std::min(a.idx[p], b.idx[p]);
  return out;
}

PathEnsemble stop(const PathEnsemble& S, const StoppingTimeVector& rho) {
  rho.check(S.n_paths);
  if (rho.level > S.grid.level)
    throw std::invalid_argument(
        "stopping vector lives on a finer grid than the ensemble");
  StoppingTimeVector fine = refine_to(rho, S.grid.level);

  ModelDescriptor inner_model = S.model;
  if (S.model.kind == ModelKind::Stopped) {
    // fold repeated stopping into one wrapper at the pointwise minimum
    fine = pointwise_min(fine, refine_to(*S.model.stop_at, S.grid.level));
    inner_model = *S.model.inner;
  }

  PathEnsemble out = S;
  const std::size_t cols = S.cols();
  const auto last = static_cast<std::int64_t>(cols - 1);
  for (std::size_t p = 0; p < S.n_paths; ++p) {
    if (fine.is_inf(p)) continue;
    const auto cut = static_cast<std::size_t>(std::min(fine.idx[p], last));
    double* row = out.data.data() + p * cols;
    const double frozen = row[cut];
    for (std::size_t i = cut + 1; i < cols; ++i) row[i] = frozen;
  }
  out.model = ModelDescriptor::stopped(
      inner_model, std::make_shared<StoppingTimeVector>(fine));
  return out;
}

JumpSplit split_large_jumps(const PathEnsemble& S, double threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("jump threshold must be positive");
  JumpSplit out;
  out.jumps = make_like(S, ModelDescriptor::derived("jumps"), S.synthesis);
  out.residual =
      make_like(S, ModelDescriptor::derived("residual"), S.synthesis);
  const std::size_t cols = S.cols();
  std::size_t n_large = 0;
#pragma omp parallel for schedule(static) reduction(+ : n_large)
  for (long long p = 0; p < static_cast<long long>(S.n_paths); ++p) {
    const double* s = S.data.data() + p * cols;
    double* j = out.jumps.data.data() + p * cols;
    double* r = out.residual.data.data() + p * cols;
    double jacc = 0.0;
    j[0] = 0.0;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      const double d = s[i + 1] - s[i];
      if (std::fabs(d) >= threshold) {
        jacc += d;
        ++n_large;
      }
      j[i + 1] = jacc;
    }
    // residual is the pointwise remainder, so J + residual recovers S to the
    // last bit wherever the subtraction was exact (always when J is 0), and
    // the starting value rides on the residual side
    for (std::size_t i = 0; i < cols; ++i) r[i] = s[i] - j[i];
  }
  out.n_large = n_large;
  return out;
}

}  // namespace martlab
