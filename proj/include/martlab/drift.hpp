#ifndef MARTLAB_DRIFT_HPP
#define MARTLAB_DRIFT_HPP

#include <string>
#include <vector>

#include "martlab/ensemble.hpp"

namespace martlab {

// How conditional one-step drifts E[S_{t_{q+1}} - S_{t_q} | history] are
// produced. Exact uses the model's closed form (throws if there is none);
// KernelRegression is a model-free Nadaraya-Watson estimate and requires a
// Markov model, since it conditions on the current value only.
struct DriftOracle {
  enum class Kind { Exact, KernelRegression };
  Kind kind = Kind::Exact;
  double bandwidth = 0.0;  // kernel only; 0 = Silverman's rule per cell

  static DriftOracle exact_for(const ModelDescriptor& m);
  static DriftOracle kernel(double bandwidth = 0.0);
  std::string name() const;
};

// conditional drifts on the cells of D_level, conditioning on the full
// fine-grid prefix of each path; row-major n_paths x 2^level
struct DriftMatrix {
  int level = 0;
  std::size_t n_paths = 0;
  std::vector<double> d;

  std::size_t cells() const { return std::size_t{1} << level; }
  double at(std::size_t p, std::size_t q) const { return d[p * cells() + q]; }
  double& at(std::size_t p, std::size_t q) { return d[p * cells() + q]; }
};

// Optional scratch shared across repeated drift calls on one ensemble (the
// tanh unwrap of a truncated model is worth reusing across levels). Bound
// to the ensemble by address; rebinds automatically when that changes.
struct DriftCache {
  const PathEnsemble* bound = nullptr;
  std::vector<double> inner_values;
  bool has_inner = false;
};

DriftMatrix conditional_drift_matrix(const PathEnsemble& S,
                                     const DriftOracle& oracle, int level,
                                     DriftCache* cache = nullptr);

// one cell of the matrix at the ensemble's own grid level; convenience for
// spot checks on small ensembles
std::vector<double> conditional_drift(const PathEnsemble& S,
                                      const DriftOracle& oracle,
                                      std::size_t cell,
                                      DriftCache* cache = nullptr);

}  // namespace martlab

#endif
