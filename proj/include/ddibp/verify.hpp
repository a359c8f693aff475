#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddibp/likelihood.hpp"
#include "ddibp/mcmc.hpp"
#include "ddibp/theory.hpp"

namespace ddibp {

// One verification check. `statistic` and `bound` are check-specific (a max
// z-score against 3, a p-value against its floor, a max deviation against a
// tolerance); `pass` is authoritative and `detail` says what was measured.
struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20120815;
  bool quick = false;
  int threads = 0;
  // Failure injection: the named check's analytic reference is multiplied by
  // `inject_scale` so the corresponding line must flip to FAIL.
  std::string inject;
  double inject_scale = 1.1;
};

std::vector<std::string> verify_check_names(bool quick);
CheckResult run_verify_check(const std::string& name, const VerifyOptions& opts);
std::vector<CheckResult> run_verify(const VerifyOptions& opts);

std::string check_result_csv_header();
std::string to_csv_line(const CheckResult& r);

// Synthetic autocorrelated time-series instance used by the sampler-facing
// checks and the CLI examples: Z* from a sequential time-gap dd-IBP prior,
// X = Z* W* + noise.
struct SyntheticData {
  DataMatrix data;
  Eigen::VectorXd times;
  Eigen::MatrixXi z_true;
  Eigen::MatrixXd w_true;
  double sigma_x;
  double sigma_w;
};

SyntheticData synthetic_timeseries(int n, int m, double beta_true, double alpha,
                                   double sigma_x, double sigma_w, std::uint64_t seed);

}  // namespace ddibp
