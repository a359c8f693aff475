#include <doctest.h>

#include <cmath>

#include "ddibp/likelihood.hpp"
#include "ddibp/prior.hpp"
#include "ddibp/proximity.hpp"
#include "ddibp/rng.hpp"
#include "ddibp/stats.hpp"

using namespace ddibp;

namespace {

FeatureMatrix random_z(int n, int k, double density, Rng& rng, bool keep_active = true) {
  Eigen::MatrixXi z(n, k);
  do {
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < k; ++c) z(i, c) = rng.bernoulli(density) ? 1 : 0;
  } while (keep_active && [&] {
    for (int c = 0; c < k; ++c)
      if (z.col(c).sum() == 0) return true;
    return false;
  }());
  return FeatureMatrix::from_z(z);
}

}  // namespace

TEST_CASE("empty Z reduces to an iid Gaussian density") {
  Rng rng(9);
  const int n = 4, m = 3;
  Eigen::MatrixXd x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
  const DataMatrix data = DataMatrix::observed(x);
  const NoiseParams np{0.7, 1.3};
  const FeatureMatrix z = FeatureMatrix::from_z(Eigen::MatrixXi(n, 0));
  const double expect = -x.squaredNorm() / (2.0 * np.sigma_x * np.sigma_x) -
                        0.5 * n * m * std::log(2.0 * M_PI * np.sigma_x * np.sigma_x);
  CHECK(collapsed_loglik(data, z, np) == doctest::Approx(expect).epsilon(1e-12));

  // A matrix of zero columns is equivalent: the active-column rule drops them.
  const FeatureMatrix zeros = FeatureMatrix::from_z(Eigen::MatrixXi::Zero(n, 5));
  CHECK(collapsed_loglik(data, zeros, np) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("collapsed likelihood is invariant to column order") {
  Rng rng(10);
  const int n = 5, m = 3, k = 4;
  const FeatureMatrix z = random_z(n, k, 0.5, rng);
  Eigen::MatrixXd x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
  const DataMatrix data = DataMatrix::observed(x);
  const NoiseParams np{0.9, 1.1};
  Eigen::MatrixXi shuffled(n, k);
  const int order[4] = {2, 0, 3, 1};
  for (int c = 0; c < k; ++c) shuffled.col(c) = z.z.col(order[c]);
  CHECK(collapsed_loglik(data, z, np) ==
        doctest::Approx(collapsed_loglik(data, FeatureMatrix::from_z(shuffled), np))
            .epsilon(1e-12));
}

TEST_CASE("collapsed likelihood equals the column-wise Gaussian oracle") {
  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + rng.uniform_int(5);
    const int m = 1 + rng.uniform_int(3);
    const int k = 1 + rng.uniform_int(3);
    const FeatureMatrix z = random_z(n, k, 0.5, rng);
    Eigen::MatrixXd x(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) x(i, j) = 2.0 * rng.normal();
    const DataMatrix data = DataMatrix::observed(x);
    const NoiseParams np{0.5 + 1.5 * rng.uniform(), 0.5 + 1.5 * rng.uniform()};
    CHECK(std::fabs(collapsed_loglik(data, z, np) - columnwise_gaussian_loglik(data, z, np)) <=
          1e-8);
  }
}

TEST_CASE("weight posterior closed forms") {
  Rng rng(12);
  const int n = 4;
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
  const DataMatrix data = DataMatrix::observed(x);

  // Z = I with unit noise: H = 2I so the mean is X/2.
  const FeatureMatrix zi = FeatureMatrix::from_z(Eigen::MatrixXi::Identity(n, n));
  const WeightPosterior post = weight_posterior(data, zi, NoiseParams{1.0, 1.0});
  CHECK(post.mean.isApprox(x / 2.0, 1e-12));
  CHECK(post.row_covariance.isApprox(0.5 * Eigen::MatrixXd::Identity(n, n), 1e-12));

  // sigma_w -> infinity: ridge penalty vanishes, mean -> least squares.
  const FeatureMatrix z = random_z(n, 2, 0.6, rng);
  const Eigen::MatrixXd zd = z.z.cast<double>();
  const WeightPosterior flat = weight_posterior(data, z, NoiseParams{1.0, 1e8});
  const Eigen::MatrixXd lstsq =
      (zd.transpose() * zd).ldlt().solve(zd.transpose() * x);
  CHECK((flat.mean - lstsq).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("posterior-ratio identity reproduces the collapsed likelihood") {
  // P(X | Z) = P(X | Z, W) P(W) / P(W | X, Z) for any W; exact Gaussian algebra.
  Rng rng(13);
  const int n = 3, m = 2, k = 2;
  const FeatureMatrix z = random_z(n, k, 0.7, rng);
  Eigen::MatrixXd x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();
  const DataMatrix data = DataMatrix::observed(x);
  const NoiseParams np{0.8, 1.4};
  const WeightPosterior post = weight_posterior(data, z, np);

  Eigen::MatrixXd w(k, m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) w(i, j) = rng.normal();

  const Eigen::MatrixXd zd = z.z.cast<double>();
  const double sx2 = np.sigma_x * np.sigma_x;
  const double lik = -(x - zd * w).squaredNorm() / (2.0 * sx2) -
                     0.5 * n * m * std::log(2.0 * M_PI * sx2);
  const double sw2 = np.sigma_w * np.sigma_w;
  const double prior = -w.squaredNorm() / (2.0 * sw2) -
                       0.5 * k * m * std::log(2.0 * M_PI * sw2);
  // Posterior density of W: independent columns, covariance sx^2 H^{-1}.
  const Eigen::MatrixXd h = post.chol_h.reconstructedMatrix();
  double log_det_h = 0.0;
  for (int i = 0; i < k; ++i) log_det_h += 2.0 * std::log(post.chol_h.matrixL()(i, i));
  double post_density = 0.0;
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd diff = w.col(j) - post.mean.col(j);
    post_density += -0.5 * diff.dot(h * diff) / sx2 -
                    0.5 * k * std::log(2.0 * M_PI * sx2) + 0.5 * log_det_h;
  }
  CHECK(collapsed_loglik(data, z, np) ==
        doctest::Approx(lik + prior - post_density).epsilon(1e-10));
}

TEST_CASE("sample_missing basics") {
  Rng rng(14);
  const int n = 4, m = 3;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, m);
  const NoiseParams np{0.6, 1.0};

  // Empty mask: unchanged object.
  DataMatrix data = DataMatrix::observed(x);
  const DataMatrix out = sample_missing(data, FeatureMatrix::from_z(Eigen::MatrixXi(n, 0)), np, rng);
  CHECK(out.x == data.x);

  // All-zero Z: imputations are iid N(0, sigma_x^2).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, m);
  mask.setConstant(true);
  DataMatrix masked = DataMatrix::with_mask(x, mask);
  std::vector<double> vals;
  for (int rep = 0; rep < 3000; ++rep) {
    const DataMatrix draw =
        sample_missing(masked, FeatureMatrix::from_z(Eigen::MatrixXi(n, 0)), np, rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) vals.push_back(draw.x(i, j));
  }
  const double se_mean = np.sigma_x / std::sqrt(static_cast<double>(vals.size()));
  CHECK(std::fabs(mean(vals)) <= 4.0 * se_mean);
  CHECK(variance(vals) == doctest::Approx(np.sigma_x * np.sigma_x).epsilon(0.05));
}

TEST_CASE("imputation Gibbs covers the truth") {
  Rng rng(15);
  const int n = 6, m = 3;
  const NoiseParams np{0.5, 1.5};
  FeatureMatrix z = random_z(n, 2, 0.6, rng);
  Eigen::MatrixXd w(2, m);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < m; ++j) w(i, j) = np.sigma_w * rng.normal();
  const Eigen::MatrixXd signal = z.z.cast<double>() * w;
  Eigen::MatrixXd x = signal;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) += np.sigma_x * rng.normal();

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, m);
  mask.setConstant(false);
  mask(2, 1) = true;
  DataMatrix data = DataMatrix::with_mask(x, mask);
  data.x(2, 1) = 0.0;

  std::vector<double> draws;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    data = sample_missing(data, z, np, rng);
    draws.push_back(data.x(2, 1));
  }
  const double post_sd = std::sqrt(variance(draws));
  CHECK(std::fabs(mean(draws) - signal(2, 1)) <= 3.0 * post_sd);
}

TEST_CASE("likelihood rejects non-finite data") {
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  DataMatrix data;
  data.x = x;
  data.missing.setConstant(2, 2, false);
  const FeatureMatrix z = FeatureMatrix::from_z(Eigen::MatrixXi::Ones(2, 1));
  CHECK_THROWS_AS(collapsed_loglik(data, z, NoiseParams{1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(collapsed_loglik(DataMatrix::observed(Eigen::MatrixXd::Zero(2, 2)), z,
                                   NoiseParams{-1.0, 1.0}),
                  std::domain_error);
}

TEST_CASE("H stays solvable at extreme noise scales") {
  Rng rng(16);
  const FeatureMatrix z = random_z(5, 3, 0.5, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 2);
  const DataMatrix data = DataMatrix::observed(x);
  CHECK(std::isfinite(collapsed_loglik(data, z, NoiseParams{1e-3, 1e3})));
  CHECK(std::isfinite(collapsed_loglik(data, z, NoiseParams{1e3, 1e-3})));
}
