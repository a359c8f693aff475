#pragma once

#include <Eigen/Dense>

#include "ddibp/decay.hpp"
#include "ddibp/distance.hpp"

namespace ddibp {

// Row-stochastic connection probabilities a(i, j) = f(d_ij) / h_i with
// normalizers h_i = sum_j f(d_ij) >= 1 (the self term f(0) = 1).
class ProximityMatrix {
 public:
  ProximityMatrix(Eigen::MatrixXd a, Eigen::VectorXd h);

  int n() const { return static_cast<int>(a_.rows()); }
  double operator()(int i, int j) const { return a_(i, j); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& normalizers() const { return h_; }
  double h(int i) const { return h_(i); }
  // log a(i, j), -inf where a(i, j) = 0.
  double log_a(int i, int j) const { return log_a_(i, j); }

  // Build directly from raw (unnormalized) proximity values; diagonal must
  // be 1. Used where a prior proximity is given instead of distances.
  static ProximityMatrix from_raw(const Eigen::MatrixXd& raw);

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd h_;
  Eigen::MatrixXd log_a_;
};

ProximityMatrix build_proximity(const DistanceMatrix& d, const DecayFunction& f);

}  // namespace ddibp
