#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddibp/likelihood.hpp"
#include "ddibp/prior.hpp"
#include "ddibp/proximity.hpp"
#include "ddibp/rng.hpp"

namespace ddibp {

struct McmcConfig {
  int iterations = 1000;
  int burn_in = 0;
  double alpha_shape = 1.0;  // Gamma shape nu_alpha
  double alpha_rate = 1.0;   // Gamma inverse scale eta_alpha
  double noise_proposal_scale = 0.1;
  std::uint64_t seed = 0;

  bool update_alpha = true;
  bool update_noise = false;
  bool update_missing = false;

  double fixed_alpha = 1.0;  // used when update_alpha is false
  double init_sigma_x = 1.0;
  double init_sigma_w = 1.0;

  // Replaces the likelihood with a constant; turns the chain into a prior
  // sampler. Used by the verification suite.
  bool flat_likelihood = false;
  // Recompute the cached log joint from scratch after every sweep and fail
  // loudly on disagreement.
  bool check_consistency = false;
  bool record_z = false;

  void validate() const;
};

struct SampleRecord {
  int iteration = 0;
  int k = 0;
  double alpha = 0.0;
  double sigma_x = 0.0;
  double sigma_w = 0.0;
  double log_joint = 0.0;
  std::optional<Eigen::MatrixXi> z;
};

std::string to_jsonl(const SampleRecord& rec);

// Full sampler state. The feature matrix and the pieces of the log joint are
// caches kept in sync by the update steps.
struct ChainState {
  PriorState prior_state;
  FeatureMatrix z;
  double alpha = 1.0;
  NoiseParams noise;
  DataMatrix data;

  double lp_lambda = 0.0;       // sum_i log Poisson(lambda_i; alpha/h_i)
  double lp_connections = 0.0;  // sum_{i,k} log a(i, c_ik)
  double loglik = 0.0;          // collapsed likelihood (0 under flat)
  double lp_alpha = 0.0;        // Gamma hyperprior at alpha
  double lp_noise = 0.0;        // log-normal hyperpriors at sigma_x, sigma_w

  double log_joint() const {
    return lp_lambda + lp_connections + loglik + lp_alpha + lp_noise;
  }
};

// Log-normal hyperprior on both noise scales; the paper gives none.
inline constexpr double kNoisePriorMu = 0.0;
inline constexpr double kNoisePriorSigma = 2.0;

// Gamma posterior parameters for alpha | c*: (shape + sum lambda_i,
// rate + sum h_i^{-1}).
std::pair<double, double> gibbs_alpha_params(const PriorState& state, const ProximityMatrix& a,
                                             double shape, double rate);

// Metropolis-within-Gibbs chain over (C, c*, alpha, sigma_x, sigma_w, X_miss).
class Chain {
 public:
  Chain(DataMatrix data, ProximityMatrix a, McmcConfig config);

  // Prior initialization: alpha from its Gamma prior (or the fixed value),
  // (lambda, C) from the dd-IBP prior, noise from config.
  void init(Rng& rng);
  void init_from(const ChainState& state);

  void sweep(Rng& rng);
  std::vector<SampleRecord> run(Rng& rng);  // `iterations` sweeps with MAP tracking

  const ChainState& state() const { return state_; }
  const ChainState& map_state() const { return map_state_; }
  const ProximityMatrix& proximity() const { return a_; }
  const McmcConfig& config() const { return config_; }

  // Individual update steps (exposed for tests and the verification suite).
  double gibbs_alpha(Rng& rng);
  void gibbs_connection(int customer, int dish, Rng& rng);
  bool mh_ownership(Rng& rng);
  bool mh_noise_sigma_x(Rng& rng);
  bool mh_noise_sigma_w(Rng& rng);
  void sample_missing_step(Rng& rng);

  // Full conditional P(c_{ik} = j | everything else) over j; test oracle
  // surface for the two-likelihood update.
  Eigen::VectorXd connection_conditional(int customer, int dish);

  double recompute_log_joint();  // from scratch; also refreshes caches
  void check_consistency_or_throw();

 private:
  double eval_loglik(const FeatureMatrix& z) const;
  void refresh_caches();
  // The two candidate reachability columns for dish k when customer i's edge
  // is resampled; returns the set of j giving the reaching column.
  void connection_classes(int customer, int dish, Eigen::VectorXi& reach_class,
                          Eigen::MatrixXi& z_reach, Eigen::MatrixXi& z_noreach);

  ProximityMatrix a_;
  McmcConfig config_;
  ChainState state_;
  ChainState map_state_;
  bool has_map_ = false;
};

struct RunResult {
  std::vector<SampleRecord> records;
  ChainState map_state;
  FeatureMatrix map_z;
};

// Orchestrates a full run: builds the proximity, initializes from the prior
// and returns the trace plus the maximum-a-posteriori visited state.
RunResult run_chain(const DataMatrix& x, const DistanceMatrix& d, const DecayFunction& f,
                    const McmcConfig& config);

// Checkpointing of the full chain state.
void save_checkpoint(const ChainState& state, const std::string& path);
ChainState load_checkpoint(const std::string& path);

}  // namespace ddibp
