#include "martlab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace martlab {

double fbm_covariance(double hurst, double s, double t) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("hurst index must lie in (0,1)");
  if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0)
    throw std::invalid_argument("fbm covariance times must lie in [0,1]");
  double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) -
                std::pow(std::fabs(t - s), h2));
}

double fgn_autocov(double hurst, long k) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("hurst index must lie in (0,1)");
  double a = static_cast<double>(std::labs(k));
  double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) +
                std::pow(std::fabs(a - 1.0), h2));
}

namespace {

double fn_linear(double t) { return t; }
double fn_quadratic(double t) { return t * t; }
double fn_sine(double t) {
  return 0.25 * std::sin(6.283185307179586476925286766559 * t);
}
double fn_zero(double) { return 0.0; }

const NamedFunction kFunctions[] = {
    {"linear", fn_linear, 1.0},
    {"quadratic", fn_quadratic, 1.0},
    {"sine", fn_sine, 0.25},
    {"zero", fn_zero, 0.0},
};

}  // namespace

const NamedFunction& named_function(const std::string& name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f;
  throw std::invalid_argument("unknown deterministic function '" + name +
                              "' (have: linear, quadratic, sine, zero)");
}

ModelDescriptor ModelDescriptor::brownian(double mu, double sigma) {
  ModelDescriptor m;
  m.kind = ModelKind::BrownianMotion;
  m.mu = mu;
  m.sigma = sigma;
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::fractional_brownian(double hurst) {
  ModelDescriptor m;
  m.kind = ModelKind::FractionalBrownianMotion;
  m.hurst = hurst;
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::compensated_poisson(double rate) {
  ModelDescriptor m;
  m.kind = ModelKind::CompensatedPoisson;
  m.rate = rate;
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::squared_brownian() {
  ModelDescriptor m;
  m.kind = ModelKind::SquaredBrownianMotion;
  return m;
}

ModelDescriptor ModelDescriptor::ornstein_uhlenbeck(double theta,
                                                    double sigma) {
  ModelDescriptor m;
  m.kind = ModelKind::OrnsteinUhlenbeck;
  m.theta = theta;
  m.sigma = sigma;
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::deterministic(const std::string& func) {
  ModelDescriptor m;
  m.kind = ModelKind::Deterministic;
  m.func = func;
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::truncated(const ModelDescriptor& inner,
                                           double bound) {
  ModelDescriptor m;
  m.kind = ModelKind::BoundedTruncation;
  m.bound = bound;
  m.inner = std::make_shared<ModelDescriptor>(inner);
  m.validate();
  return m;
}

ModelDescriptor ModelDescriptor::stopped(
    const ModelDescriptor& inner,
    std::shared_ptr<const StoppingTimeVector> at) {
  ModelDescriptor m;
  m.kind = ModelKind::Stopped;
  m.inner = std::make_shared<ModelDescriptor>(inner);
  m.stop_at = std::move(at);
  if (!m.stop_at)
    throw std::invalid_argument("stopped model needs a stopping vector");
  return m;
}

ModelDescriptor ModelDescriptor::derived(const std::string& note) {
  ModelDescriptor m;
  m.kind = ModelKind::Derived;
  m.note = note;
  return m;
}

void ModelDescriptor::validate() const {
  switch (kind) {
    case ModelKind::BrownianMotion:
    case ModelKind::OrnsteinUhlenbeck:
      if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
      if (kind == ModelKind::OrnsteinUhlenbeck && !(theta > 0.0))
        throw std::invalid_argument("theta must be positive");
      break;
    case ModelKind::FractionalBrownianMotion:
      if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("hurst index must lie in (0,1)");
      break;
    case ModelKind::CompensatedPoisson:
      if (!(rate > 0.0))
        throw std::invalid_argument("rate must be positive");
      break;
    case ModelKind::Deterministic:
      named_function(func);  // throws if unknown
      break;
    case ModelKind::BoundedTruncation:
      if (!(bound > 0.0))
        throw std::invalid_argument("truncation bound must be positive");
      if (!inner)
        throw std::invalid_argument("truncation needs an inner model");
      inner->validate();
      break;
    default:
      break;
  }
}

bool ModelDescriptor::has_exact_drift_oracle() const {
  switch (kind) {
    case ModelKind::BrownianMotion:
    case ModelKind::FractionalBrownianMotion:
    case ModelKind::CompensatedPoisson:
    case ModelKind::SquaredBrownianMotion:
    case ModelKind::OrnsteinUhlenbeck:
    case ModelKind::Deterministic:
      return true;
    case ModelKind::BoundedTruncation:
      // exact via Gaussian predictive law of the inner process
      return inner && (inner->kind == ModelKind::BrownianMotion ||
                       inner->kind == ModelKind::FractionalBrownianMotion ||
                       inner->kind == ModelKind::OrnsteinUhlenbeck);
    case ModelKind::Stopped:
      return inner && inner->has_exact_drift_oracle();
    case ModelKind::Derived:
      return false;
  }
  return false;
}

std::optional<double> ModelDescriptor::known_sup_bound() const {
  switch (kind) {
    case ModelKind::BoundedTruncation:
      return bound;
    case ModelKind::Deterministic:
      return named_function(func).sup_abs;
    case ModelKind::Stopped:
      // freezing a path never enlarges its sup
      return inner ? inner->known_sup_bound() : std::nullopt;
    default:
      return std::nullopt;
  }
}

bool ModelDescriptor::is_markov() const {
  switch (kind) {
    case ModelKind::BrownianMotion:
    case ModelKind::CompensatedPoisson:
    case ModelKind::SquaredBrownianMotion:
    case ModelKind::OrnsteinUhlenbeck:
    case ModelKind::Deterministic:
      return true;
    case ModelKind::BoundedTruncation:
      // tanh is a bijection, so the compressed value carries the same state
      return inner && inner->is_markov();
    default:
      return false;
  }
}

std::string ModelDescriptor::label() const {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  switch (kind) {
    case ModelKind::BrownianMotion:
      return "bm(mu=" + num(mu) + ",sigma=" + num(sigma) + ")";
    case ModelKind::FractionalBrownianMotion:
      return "fbm(hurst=" + num(hurst) + ")";
    case ModelKind::CompensatedPoisson:
      return "cpois(rate=" + num(rate) + ")";
    case ModelKind::SquaredBrownianMotion:
      return "squared-bm";
    case ModelKind::OrnsteinUhlenbeck:
      return "ou(theta=" + num(theta) + ",sigma=" + num(sigma) + ")";
    case ModelKind::Deterministic:
      return "deterministic(" + func + ")";
    case ModelKind::BoundedTruncation:
      return "truncated(" + (inner ? inner->label() : "?") +
             ",bound=" + num(bound) + ")";
    case ModelKind::Stopped:
      return "stopped(" + (inner ? inner->label() : "?") + ")";
    case ModelKind::Derived:
      return "derived:" + note;
  }
  return "?";
}

nlohmann::json ModelDescriptor::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case ModelKind::BrownianMotion:
      j["kind"] = "bm";
      j["mu"] = mu;
      j["sigma"] = sigma;
      break;
    case ModelKind::FractionalBrownianMotion:
      j["kind"] = "fbm";
      j["hurst"] = hurst;
      break;
    case ModelKind::CompensatedPoisson:
      j["kind"] = "cpois";
      j["rate"] = rate;
      break;
    case ModelKind::SquaredBrownianMotion:
      j["kind"] = "squared-bm";
      break;
    case ModelKind::OrnsteinUhlenbeck:
      j["kind"] = "ou";
      j["theta"] = theta;
      j["sigma"] = sigma;
      break;
    case ModelKind::Deterministic:
      j["kind"] = "deterministic";
      j["func"] = func;
      break;
    case ModelKind::BoundedTruncation:
      j["kind"] = "truncated";
      j["bound"] = bound;
      if (inner) j["inner"] = inner->to_json();
      break;
    case ModelKind::Stopped:
      j["kind"] = "stopped";
      if (inner) j["inner"] = inner->to_json();
      break;
    case ModelKind::Derived:
      j["kind"] = "derived";
      j["note"] = note;
      break;
  }
  return j;
}

}  // namespace martlab
