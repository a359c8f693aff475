#include "ddibp/distance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ddibp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols() || d_.rows() < 1) {
    throw std::invalid_argument("DistanceMatrix: must be square and nonempty");
  }
  for (int i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) throw std::invalid_argument("DistanceMatrix: self-distance must be 0");
    for (int j = 0; j < d_.cols(); ++j) {
      const double v = d_(i, j);
      if (std::isnan(v) || v < 0.0) {
        throw std::invalid_argument("DistanceMatrix: entries must be nonnegative (inf allowed)");
      }
    }
  }
}

bool DistanceMatrix::is_sequential() const {
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (d_(i, j) != kInf) return false;
  return true;
}

DistanceMatrix DistanceMatrix::sequential(int n) {
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = j <= i ? static_cast<double>(i - j) : kInf;
  return DistanceMatrix(d);
}

DistanceMatrix DistanceMatrix::absolute_difference(const Eigen::VectorXd& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::fabs(t(i) - t(j));
  return DistanceMatrix(d);
}

DistanceMatrix DistanceMatrix::sequential_absolute_difference(const Eigen::VectorXd& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = j <= i ? std::fabs(t(i) - t(j)) : kInf;
  return DistanceMatrix(d);
}

DistanceMatrix DistanceMatrix::permuted(const std::vector<int>& perm) const {
  Eigen::MatrixXd out(n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) out(perm[i], perm[j]) = d_(i, j);
  return DistanceMatrix(out);
}

}  // namespace ddibp
