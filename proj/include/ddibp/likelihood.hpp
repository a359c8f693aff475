#pragma once

#include <Eigen/Dense>

#include "ddibp/prior.hpp"
#include "ddibp/rng.hpp"

namespace ddibp {

// Observed data with an optional missingness mask. Masked entries hold the
// current imputed values while a chain runs.
struct DataMatrix {
  Eigen::MatrixXd x;                                       // N x M
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing;  // N x M, true = unobserved

  int n() const { return static_cast<int>(x.rows()); }
  int m() const { return static_cast<int>(x.cols()); }
  bool has_missing() const { return missing.size() > 0 && missing.any(); }

  static DataMatrix observed(Eigen::MatrixXd x);
  static DataMatrix with_mask(Eigen::MatrixXd x,
                              Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> missing);
};

struct NoiseParams {
  double sigma_x = 1.0;  // observation noise std
  double sigma_w = 1.0;  // weight prior std
};

struct WeightPosterior {
  Eigen::MatrixXd mean;            // K x M
  Eigen::MatrixXd row_covariance;  // K x K, sigma_x^2 H^{-1}
  Eigen::LLT<Eigen::MatrixXd> chol_h;  // Cholesky of H, for sampling
};

// log P(X | Z) with the weights integrated out:
//   -(1/2 sx^2) tr(X^T (I - Z H^{-1} Z^T) X) - (NM/2) log 2pi
//   - (N-K) M log sx - K M log sw - (M/2) log |H|,
// H = Z^T Z + (sx^2/sw^2) I over the active columns of Z only.
double collapsed_loglik(const DataMatrix& x, const FeatureMatrix& z, const NoiseParams& np);

// Gaussian posterior over W: mean H^{-1} Z^T X, row covariance sx^2 H^{-1}.
WeightPosterior weight_posterior(const DataMatrix& x, const FeatureMatrix& z,
                                 const NoiseParams& np);

// Draw W from its posterior given the currently imputed X, then redraw the
// masked entries as (ZW) + Normal(0, sx^2). Observed entries are untouched.
DataMatrix sample_missing(const DataMatrix& x, const FeatureMatrix& z, const NoiseParams& np,
                          Rng& rng);

// Draw W ~ posterior (used by sample_missing; exposed for tests).
Eigen::MatrixXd sample_weights(const WeightPosterior& post, double sigma_x, Rng& rng);

// E[X] = Z W under the posterior-mean weights; the reconstruction used for
// missing-data error reports.
Eigen::MatrixXd posterior_mean_reconstruction(const DataMatrix& x, const FeatureMatrix& z,
                                              const NoiseParams& np);

// Test oracle: sum over columns m of log N(x_m; 0, sw^2 Z Z^T + sx^2 I).
// Kept as an independent route to the same marginal likelihood.
double columnwise_gaussian_loglik(const DataMatrix& x, const FeatureMatrix& z,
                                  const NoiseParams& np);

}  // namespace ddibp
