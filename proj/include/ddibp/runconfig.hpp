#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ddibp {

// Flat dotted-key configuration shared by every subcommand. Serializes to a
// `key = value` text file; a persisted config reproduces the run exactly.
struct RunConfig {
  std::string subcommand;

  // paths
  std::string data_path;
  std::string distances_path;
  std::string truth_path;
  std::string out_dir;

  // distance construction
  std::string distance_kind = "matrix";  // matrix | absolute-difference |
                                         // sequential-absolute-difference
  int distance_column = 0;

  // decay spec
  std::string decay_kind = "exponential";
  double decay_beta = 1.0;
  double decay_nu = 1.0;

  std::string model = "ddibp";  // ddibp | ibp | dhbp

  // mcmc
  int iterations = 1000;
  int burn_in = 0;
  std::uint64_t seed = 0;
  bool fix_alpha = false;
  double alpha = 1.0;  // fixed-alpha value; also the simulate/sharing mass
  double alpha_shape = 1.0;
  double alpha_rate = 1.0;
  double sigma_x = 1.0;
  double sigma_w = 1.0;
  bool update_noise = false;
  double noise_proposal_scale = 0.1;
  bool impute = false;
  bool record_z = false;

  // preprocessing
  bool zscore = false;

  // simulate / sharing / dhbp
  int draws = 4;
  double c0 = 10.0;
  double c1 = 1.0;
  int k_trunc = 2000;
  int n = 10;  // customer count when no data/distances given
  int max_r = 40;
  std::vector<double> beta_sweep;
  std::vector<double> a12_grid;

  // verify
  bool quick = false;
  std::string inject;
  int threads = 0;

  std::string serialize() const;        // sorted `key = value` lines
  void apply(const std::string& key, const std::string& value);
  static RunConfig load_file(const std::string& path);
  std::uint64_t hash() const;           // FNV-1a of the serialized form
  void validate() const;                // throws std::invalid_argument
};

extern const char* kVersionString;
extern const char* kOutdirEnvVar;

// Resolved output directory: config value, else $DDIBP_OUTDIR, else "./out".
std::string resolve_out_dir(const RunConfig& config);

}  // namespace ddibp
