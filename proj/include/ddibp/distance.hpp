#pragma once

#include <string>

#include <Eigen/Dense>

namespace ddibp {

// N x N matrix of nonnegative customer distances. Infinity is a legal entry
// (std::numeric_limits<double>::infinity()) and means "never connects".
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Eigen::MatrixXd d);

  int n() const { return static_cast<int>(d_.rows()); }
  double operator()(int i, int j) const { return d_(i, j); }
  const Eigen::MatrixXd& matrix() const { return d_; }

  // True iff d(i, j) = inf for all j > i, i.e. customers only see the past.
  bool is_sequential() const;

  // d(i, j) = i - j for j <= i, inf otherwise.
  static DistanceMatrix sequential(int n);
  // d(i, j) = |t_i - t_j|.
  static DistanceMatrix absolute_difference(const Eigen::VectorXd& t);
  // As above but with d(i, j) = inf for j > i.
  static DistanceMatrix sequential_absolute_difference(const Eigen::VectorXd& t);

  // Rows and columns permuted by perm: out(perm[i], perm[j]) = d(i, j).
  DistanceMatrix permuted(const std::vector<int>& perm) const;

 private:
  Eigen::MatrixXd d_;
};

}  // namespace ddibp
