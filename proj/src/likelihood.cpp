#include "ddibp/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace ddibp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd active_z(const FeatureMatrix& z) {
  const int n = z.n();
  const int ka = static_cast<int>(z.active_columns.size());
  Eigen::MatrixXd za(n, ka);
  for (int c = 0; c < ka; ++c) za.col(c) = z.z.col(z.active_columns[c]).cast<double>();
  return za;
}

void check_finite(const DataMatrix& x) {
  if (!x.x.allFinite()) throw std::domain_error("data matrix has non-finite entries");
}

void check_noise(const NoiseParams& np) {
  if (!(np.sigma_x > 0.0) || !(np.sigma_w > 0.0)) {
    throw std::domain_error("noise params must be strictly positive");
  }
}

}  // namespace

DataMatrix DataMatrix::observed(Eigen::MatrixXd x) {
  DataMatrix d;
  d.x = std::move(x);
  d.missing.setConstant(d.x.rows(), d.x.cols(), false);
  return d;
}

DataMatrix DataMatrix::with_mask(Eigen::MatrixXd x,
                                 Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing) {
  if (x.rows() != missing.rows() || x.cols() != missing.cols()) {
    throw std::invalid_argument("DataMatrix: mask shape mismatch");
  }
  DataMatrix d;
  d.x = std::move(x);
  d.missing = std::move(missing);
  return d;
}

double collapsed_loglik(const DataMatrix& x, const FeatureMatrix& z, const NoiseParams& np) {
  check_finite(x);
  check_noise(np);
  const double n = x.n();
  const double m = x.m();
  const double sx2 = np.sigma_x * np.sigma_x;

  const int ka = static_cast<int>(z.active_columns.size());
  if (ka == 0) {
    return -x.x.squaredNorm() / (2.0 * sx2) - 0.5 * n * m * kLog2Pi - n * m * std::log(np.sigma_x);
  }
  const Eigen::MatrixXd za = active_z(z);
  const double ratio = sx2 / (np.sigma_w * np.sigma_w);
  Eigen::MatrixXd h = za.transpose() * za;
  h.diagonal().array() += ratio;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  // H >= (sx^2/sw^2) I, so the factorization cannot fail for positive noise.
  if (llt.info() != Eigen::Success) throw std::runtime_error("collapsed_loglik: H factorization failed");

  const Eigen::MatrixXd ztx = za.transpose() * x.x;           // K x M
  const Eigen::MatrixXd hinv_ztx = llt.solve(ztx);            // K x M
  const double quad = x.x.squaredNorm() - (ztx.array() * hinv_ztx.array()).sum();
  double log_det_h = 0.0;
  for (int i = 0; i < ka; ++i) log_det_h += 2.0 * std::log(llt.matrixL()(i, i));

  return -quad / (2.0 * sx2) - 0.5 * n * m * kLog2Pi - (n - ka) * m * std::log(np.sigma_x) -
         ka * m * std::log(np.sigma_w) - 0.5 * m * log_det_h;
}

WeightPosterior weight_posterior(const DataMatrix& x, const FeatureMatrix& z,
                                 const NoiseParams& np) {
  check_finite(x);
  check_noise(np);
  const Eigen::MatrixXd za = active_z(z);
  const int ka = static_cast<int>(za.cols());
  const double sx2 = np.sigma_x * np.sigma_x;
  Eigen::MatrixXd h = za.transpose() * za;
  h.diagonal().array() += sx2 / (np.sigma_w * np.sigma_w);
  WeightPosterior post;
  post.chol_h.compute(h);
  if (post.chol_h.info() != Eigen::Success) {
    throw std::runtime_error("weight_posterior: H factorization failed");
  }
  post.mean = post.chol_h.solve(za.transpose() * x.x);
  post.row_covariance = sx2 * post.chol_h.solve(Eigen::MatrixXd::Identity(ka, ka));
  return post;
}

Eigen::MatrixXd sample_weights(const WeightPosterior& post, double sigma_x, Rng& rng) {
  const int k = static_cast<int>(post.mean.rows());
  const int m = static_cast<int>(post.mean.cols());
  Eigen::MatrixXd g(k, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) g(i, j) = rng.normal();
  // W = mean + sx L^{-T} G gives row covariance sx^2 H^{-1} per column.
  return post.mean + sigma_x * post.chol_h.matrixU().solve(g);
}

DataMatrix sample_missing(const DataMatrix& x, const FeatureMatrix& z, const NoiseParams& np,
                          Rng& rng) {
  check_noise(np);
  if (!x.has_missing()) return x;
  DataMatrix out = x;
  const int ka = static_cast<int>(z.active_columns.size());
  Eigen::MatrixXd zw;
  if (ka == 0) {
    zw = Eigen::MatrixXd::Zero(x.n(), x.m());
  } else {
    const WeightPosterior post = weight_posterior(x, z, np);
    const Eigen::MatrixXd w = sample_weights(post, np.sigma_x, rng);
    zw = active_z(z) * w;
  }
  for (int i = 0; i < x.n(); ++i) {
    for (int j = 0; j < x.m(); ++j) {
      if (x.missing(i, j)) out.x(i, j) = zw(i, j) + np.sigma_x * rng.normal();
    }
  }
  return out;
}

Eigen::MatrixXd posterior_mean_reconstruction(const DataMatrix& x, const FeatureMatrix& z,
                                              const NoiseParams& np) {
  if (z.active_columns.empty()) return Eigen::MatrixXd::Zero(x.n(), x.m());
  const WeightPosterior post = weight_posterior(x, z, np);
  return active_z(z) * post.mean;
}

double columnwise_gaussian_loglik(const DataMatrix& x, const FeatureMatrix& z,
                                  const NoiseParams& np) {
  check_finite(x);
  check_noise(np);
  const int n = x.n();
  const Eigen::MatrixXd za = active_z(z);
  Eigen::MatrixXd cov = np.sigma_w * np.sigma_w * za * za.transpose();
  cov.diagonal().array() += np.sigma_x * np.sigma_x;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("gaussian oracle: factorization failed");
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  double ll = 0.0;
  for (int j = 0; j < x.m(); ++j) {
    const Eigen::VectorXd col = x.x.col(j);
    ll += -0.5 * col.dot(llt.solve(col)) - 0.5 * log_det - 0.5 * n * kLog2Pi;
  }
  return ll;
}

}  // namespace ddibp
