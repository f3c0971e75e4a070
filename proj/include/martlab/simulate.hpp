#ifndef MARTLAB_SIMULATE_HPP
#define MARTLAB_SIMULATE_HPP

#include <cstdint>

#include "martlab/ensemble.hpp"

namespace martlab {

struct SimulateOptions {
  enum class FbmMethod { Auto, Circulant, Cholesky };
  FbmMethod fbm_method = FbmMethod::Auto;
};

// Draw n_paths independent paths of the model on D_level. Deterministic in
// (model, level, n_paths, seed): path p consumes only its own stream, so the
// result is byte-identical for any thread count, and a prefix of the paths
// of a larger ensemble with the same seed.
PathEnsemble simulate(const ModelDescriptor& model, int level,
                      std::size_t n_paths, std::uint64_t seed,
                      const SimulateOptions& opt = {});

// Circulant-embedding eigenvalues for fGn on D_level (physical spacing).
// Exposed for tests; all are strictly positive for the Hurst range we use.
std::vector<double> fgn_embedding_eigenvalues(double hurst, int level);

}  // namespace martlab

#endif
