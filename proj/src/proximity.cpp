#include "ddibp/proximity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddibp {

namespace {

Eigen::MatrixXd log_of(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out(i, j) = a(i, j) > 0.0 ? std::log(a(i, j)) : -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

ProximityMatrix::ProximityMatrix(Eigen::MatrixXd a, Eigen::VectorXd h)
    : a_(std::move(a)), h_(std::move(h)), log_a_(log_of(a_)) {
  if (a_.rows() != a_.cols() || a_.rows() != h_.size()) {
    throw std::invalid_argument("ProximityMatrix: shape mismatch");
  }
  for (int i = 0; i < a_.rows(); ++i) {
    if (!(h_(i) >= 1.0)) throw std::invalid_argument("ProximityMatrix: h_i must be >= 1");
    if (std::fabs(a_.row(i).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("ProximityMatrix: rows must sum to 1");
    }
  }
}

ProximityMatrix ProximityMatrix::from_raw(const Eigen::MatrixXd& raw) {
  const int n = static_cast<int>(raw.rows());
  Eigen::VectorXd h(n);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    if (raw(i, i) != 1.0) throw std::invalid_argument("raw proximity: diagonal must be 1");
    h(i) = raw.row(i).sum();
    a.row(i) = raw.row(i) / h(i);
  }
  return ProximityMatrix(a, h);
}

ProximityMatrix build_proximity(const DistanceMatrix& d, const DecayFunction& f) {
  const int n = d.n();
  Eigen::MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = f(d(i, j));
  Eigen::VectorXd h = raw.rowwise().sum();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) a.row(i) = raw.row(i) / h(i);
  return ProximityMatrix(a, h);
}

}  // namespace ddibp
