#ifndef MARTLAB_MODEL_HPP
#define MARTLAB_MODEL_HPP

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

namespace martlab {

struct StoppingTimeVector;

// Covariance of fractional Brownian motion with Hurst index H at times s,t.
double fbm_covariance(double hurst, double s, double t);

// Autocovariance of unit-spacing fractional Gaussian noise at lag k
// (variance-normalized spacing; scale by dt^(2H) for a physical grid).
double fgn_autocov(double hurst, long k);

// Named deterministic path used by the Deterministic model.
struct NamedFunction {
  std::string name;
  double (*f)(double);
  double sup_abs;  // exact sup of |f| on [0,1]
};
const NamedFunction& named_function(const std::string& name);

enum class ModelKind {
  BrownianMotion,
  FractionalBrownianMotion,
  CompensatedPoisson,
  SquaredBrownianMotion,
  OrnsteinUhlenbeck,
  Deterministic,
  BoundedTruncation,
  Stopped,
  Derived,  // outputs of operations (integrals, decompositions, splits)
};

struct ModelDescriptor {
  ModelKind kind = ModelKind::BrownianMotion;
  double mu = 0.0;
  double sigma = 1.0;
  double hurst = 0.5;
  double rate = 1.0;
  double theta = 1.0;
  double bound = 1.0;
  std::string func = "linear";  // Deterministic: registry name
  std::string note;             // Derived: free-text origin tag
  std::shared_ptr<const ModelDescriptor> inner;       // truncation / stopped
  std::shared_ptr<const StoppingTimeVector> stop_at;  // stopped

  static ModelDescriptor brownian(double mu, double sigma);
  static ModelDescriptor fractional_brownian(double hurst);
  static ModelDescriptor compensated_poisson(double rate);
  static ModelDescriptor squared_brownian();
  static ModelDescriptor ornstein_uhlenbeck(double theta, double sigma);
  static ModelDescriptor deterministic(const std::string& func);
  static ModelDescriptor truncated(const ModelDescriptor& inner, double bound);
  static ModelDescriptor stopped(const ModelDescriptor& inner,
                                 std::shared_ptr<const StoppingTimeVector> at);
  static ModelDescriptor derived(const std::string& note);

  // true when a closed-form conditional one-step drift is available
  bool has_exact_drift_oracle() const;
  // exact a.s. bound on sup_t |S_t| when one is known
  std::optional<double> known_sup_bound() const;
  // one-step transition depends on the current value only
  bool is_markov() const;

  void validate() const;  // throws std::invalid_argument on bad parameters
  std::string label() const;
  nlohmann::json to_json() const;
};

}  // namespace martlab

#endif
