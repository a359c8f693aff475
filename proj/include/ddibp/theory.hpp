#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ddibp/prior.hpp"
#include "ddibp/proximity.hpp"
#include "ddibp/rng.hpp"

namespace ddibp {

// Per-draw feature counts R_i = sum_k z_ik and shared counts
// R_ij = sum_k z_ik z_jk, plus the fraction R_ij / R_i (0 when R_i = 0).
struct SharingStats {
  Eigen::VectorXi r;        // N
  Eigen::MatrixXi r_pair;   // N x N, symmetric, diagonal = r
  Eigen::MatrixXd fraction; // N x N

  // Fraction matrix with the diagonal zeroed, the heatmap-export convention.
  Eigen::MatrixXd fraction_zero_diagonal() const;
};

SharingStats sharing_stats(const FeatureMatrix& z);

// Single-dish reachability probabilities. p_single(i, n) = P(owner n is
// reachable from i); p_pair[n](i, j) = P(reachable from both i and j).
// These do not depend on dish ownership counts, only on the proximity rows.
struct ReachProbs {
  Eigen::MatrixXd p_single;            // N x N
  std::vector<Eigen::MatrixXd> p_pair; // N of N x N (indexed by owner n)
};

// Exact enumeration over all N^N single-dish connection configurations.
// Cost is O(N^N * N^2); refuses N > 7 (use reach_probs_mc above that).
ReachProbs reach_probs_exact(const ProximityMatrix& a);

// Monte-Carlo estimate of the same probabilities over `draws` configurations.
ReachProbs reach_probs_mc(const ProximityMatrix& a, long long draws, std::uint64_t seed,
                          int threads = 0);

// Poisson rates for R_i and R_ij:
//   rate_i  = alpha * sum_n h_n^{-1} P(L_in = 1)
//   rate_ij = alpha * sum_n h_n^{-1} P(L_in = 1, L_jn = 1).
struct SharingRates {
  Eigen::VectorXd rate_single;  // N
  Eigen::MatrixXd rate_pair;    // N x N
};

SharingRates ddibp_sharing_rates(const ProximityMatrix& a, double alpha,
                                 const ReachProbs& probs);

// Large-mass limit of R_ij / R_i: rate_pair(i, j) / rate_single(i).
Eigen::MatrixXd ddibp_limit_fractions(const ProximityMatrix& a, const ReachProbs& probs);

// Truncated dependent hierarchical beta process.
struct DhbpParams {
  double gamma = 1.0;   // mass
  double c0 = 1.0;      // top-level concentration
  double c1 = 1.0;      // group-level concentration
  int k_trunc = 2000;   // finite approximation atom count
};

struct DhbpDraw {
  FeatureMatrix z;
  std::vector<int> groups;  // g_i, one per customer
};

// Finite-K beta approximation: p_k ~ Beta(c0 g/Kt, c0 (1 - g/Kt)),
// p*_jk ~ Beta(c1 p_k, c1 (1 - p_k)), g_i ~ Multinomial(a_i),
// z_ik ~ Bernoulli(p*_{g_i k}).
DhbpDraw sample_dhbp(const DhbpParams& params, const ProximityMatrix& a, Rng& rng);

// The two limiting values of R_ij / R_i under the dHBP.
struct DhbpLimits {
  double same_group;  // (c0 + c1 + 1) / ((c0 + 1)(c1 + 1))
  double diff_group;  // 1 / (c0 + 1)
};

DhbpLimits dhbp_limit_fractions(double c0, double c1);

// Direct sequential IBP draw; the independent oracle for reduction tests.
// First customer takes Poisson(alpha) dishes; customer i takes existing dish
// k with probability m_k / i and Poisson(alpha / i) new dishes.
FeatureMatrix ibp_baseline_sample(double alpha, int n, Rng& rng);

// PMF of the two-point shared-feature count R_12 as the raw proximity a_12
// sweeps a grid. Two customers; proximity convention: raw self-proximity 1,
// cross-proximity a_12 (a_12 = 1/d_12), rows then normalized as usual.
struct PmfSweepRow {
  double a12 = 0.0;
  std::vector<double> pmf;        // P(R_12 = r), r = 0..max_r
  double expected_r_single = 0.0; // E[R_i] at this grid point
};

enum class SharingModel { kDdibp, kDhbp };

// dd-IBP rows are exact (Poisson via exact reach probabilities); dHBP rows
// are empirical over `draws` truncated simulations.
std::vector<PmfSweepRow> sharing_pmf_sweep(SharingModel model,
                                           const std::vector<double>& a12_grid, double mass,
                                           int max_r, const DhbpParams& dhbp_params,
                                           long long draws, std::uint64_t seed);

}  // namespace ddibp
