#include "ddibp/decay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddibp {

DecayFunction::DecayFunction(DecayKind kind, double beta, double nu)
    : kind_(kind), beta_(beta), nu_(nu) {}

DecayFunction DecayFunction::constant() { return DecayFunction(DecayKind::kConstant, 0.0, 0.0); }

DecayFunction DecayFunction::exponential(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("exponential decay: beta must be positive");
  return DecayFunction(DecayKind::kExponential, beta, 0.0);
}

DecayFunction DecayFunction::logistic(double beta, double nu) {
  if (!(beta > 0.0)) throw std::invalid_argument("logistic decay: beta must be positive");
  return DecayFunction(DecayKind::kLogistic, beta, nu);
}

DecayFunction DecayFunction::window(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("window decay: nu must be positive");
  return DecayFunction(DecayKind::kWindow, 0.0, nu);
}

DecayFunction DecayFunction::from_spec(const std::string& kind, double beta, double nu) {
  if (kind == "constant") return constant();
  if (kind == "exponential") return exponential(beta);
  if (kind == "logistic") return logistic(beta, nu);
  if (kind == "window") return window(nu);
  throw std::invalid_argument("unknown decay kind: " + kind);
}

std::string DecayFunction::kind_name() const {
  switch (kind_) {
    case DecayKind::kConstant: return "constant";
    case DecayKind::kExponential: return "exponential";
    case DecayKind::kLogistic: return "logistic";
    case DecayKind::kWindow: return "window";
  }
  return "?";
}

double DecayFunction::operator()(double d) const {
  if (std::isnan(d) || d < 0.0) throw std::domain_error("decay: distance must be nonnegative");
  // The infinity sentinel is resolved here; it never reaches exp().
  if (std::isinf(d)) return 0.0;
  if (d == 0.0) return 1.0;
  switch (kind_) {
    case DecayKind::kConstant:
      return 1.0;
    case DecayKind::kExponential:
      return std::exp(-beta_ * d);
    case DecayKind::kLogistic:
      return (1.0 + std::exp(-nu_)) / (1.0 + std::exp(beta_ * d - nu_));
    case DecayKind::kWindow:
      return d < nu_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double decay_eval(const DecayFunction& f, double d) { return f(d); }

}  // namespace ddibp
