#pragma once

#include <string>

namespace ddibp {

enum class DecayKind { kConstant, kExponential, kLogistic, kWindow };

// Nonincreasing map from distance to [0, 1] with f(0) = 1 and f(inf) = 0.
//   constant     f(d) = 1 for finite d
//   exponential  f(d) = exp(-beta d)
//   logistic     f(d) = (1 + exp(-nu)) / (1 + exp(beta d - nu))
//   window       f(d) = 1[d < nu]
// The logistic form carries a (1 + exp(-nu)) normalizer so that f(0) = 1
// holds exactly for every parameterization.
class DecayFunction {
 public:
  static DecayFunction constant();
  static DecayFunction exponential(double beta);
  static DecayFunction logistic(double beta, double nu);
  static DecayFunction window(double nu);

  // Parse "constant", "exponential", "logistic", "window".
  static DecayFunction from_spec(const std::string& kind, double beta, double nu);

  double operator()(double d) const;

  DecayKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double nu() const { return nu_; }
  std::string kind_name() const;

 private:
  DecayFunction(DecayKind kind, double beta, double nu);
  DecayKind kind_;
  double beta_ = 0.0;
  double nu_ = 0.0;
};

double decay_eval(const DecayFunction& f, double d);

}  // namespace ddibp
