#ifndef MARTLAB_ENSEMBLE_HPP
#define MARTLAB_ENSEMBLE_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "martlab/grid.hpp"
#include "martlab/model.hpp"

namespace martlab {

// A Monte Carlo ensemble of paths tabulated on one dyadic grid.
// data is row-major: n_paths rows of grid.n_points() values, S_0 first.
struct PathEnsemble {
  DyadicGrid grid;
  std::size_t n_paths = 0;
  ModelDescriptor model;
  std::uint64_t seed = 0;
  std::string synthesis;  // "recursive", "circulant", "cholesky", ...
  std::vector<double> data;

  std::size_t cols() const { return grid.n_points(); }

  double value(std::size_t path, std::size_t i) const {
    return data[path * cols() + i];
  }
  double& value(std::size_t path, std::size_t i) {
    return data[path * cols() + i];
  }
  std::span<const double> path(std::size_t p) const {
    return {data.data() + p * cols(), cols()};
  }
  std::span<double> path(std::size_t p) {
    return {data.data() + p * cols(), cols()};
  }

  void check_shape() const {
    if (data.size() != n_paths * cols())
      throw std::logic_error("ensemble data size does not match shape");
  }
};

inline PathEnsemble make_like(const PathEnsemble& s, const ModelDescriptor& m,
                              const std::string& synthesis) {
  PathEnsemble out;
  out.grid = s.grid;
  out.n_paths = s.n_paths;
  out.model = m;
  out.seed = s.seed;
  out.synthesis = synthesis;
  out.data.assign(s.data.size(), 0.0);
  return out;
}

}  // namespace martlab

#endif
