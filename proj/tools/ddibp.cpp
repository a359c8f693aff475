#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddibp/commands.hpp"
#include "ddibp/runconfig.hpp"

namespace {

// A --config file provides the defaults; explicit flags override it. The
// file is located in a pre-pass so CLI11 can bind options directly onto the
// loaded struct.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return "";
}

void add_common(CLI::App* cmd, ddibp::RunConfig& config) {
  std::string ignored;
  cmd->add_option("--config", ignored, "config file (key = value per line)");
  cmd->add_option("--out", config.out_dir, "output directory (default $DDIBP_OUTDIR or ./out)");
  cmd->add_option("--seed", config.seed, "rng seed");
  cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
}

void add_model(CLI::App* cmd, ddibp::RunConfig& config) {
  cmd->add_option("--model", config.model, "ddibp | ibp | dhbp");
  cmd->add_option("--decay", config.decay_kind, "constant | exponential | logistic | window");
  cmd->add_option("--beta", config.decay_beta, "decay beta parameter");
  cmd->add_option("--nu", config.decay_nu, "decay nu parameter");
  cmd->add_option("--alpha", config.alpha, "mass parameter (fixed alpha / gamma)");
  cmd->add_option("--c0", config.c0, "dHBP top-level concentration");
  cmd->add_option("--c1", config.c1, "dHBP group-level concentration");
  cmd->add_option("--k-trunc", config.k_trunc, "dHBP truncation atom count");
  cmd->add_option("--distances", config.distances_path, "distance CSV (or covariate column)");
  cmd->add_option("--distance-kind", config.distance_kind,
                  "matrix | absolute-difference | sequential-absolute-difference");
  cmd->add_option("--distance-column", config.distance_column, "covariate column index");
}

void add_mcmc(CLI::App* cmd, ddibp::RunConfig& config) {
  cmd->add_option("--data", config.data_path, "data CSV (nan/empty = missing)");
  cmd->add_option("--iterations", config.iterations, "MCMC sweeps");
  cmd->add_option("--burn-in", config.burn_in, "burn-in sweeps");
  cmd->add_flag("--fix-alpha", config.fix_alpha, "keep alpha fixed at --alpha");
  cmd->add_option("--alpha-shape", config.alpha_shape, "Gamma prior shape for alpha");
  cmd->add_option("--alpha-rate", config.alpha_rate, "Gamma prior inverse scale for alpha");
  cmd->add_option("--sigma-x", config.sigma_x, "initial observation noise std");
  cmd->add_option("--sigma-w", config.sigma_w, "initial weight prior std");
  cmd->add_flag("--update-noise", config.update_noise, "Metropolis updates for sigma_x, sigma_w");
  cmd->add_option("--noise-scale", config.noise_proposal_scale, "noise proposal scale");
  cmd->add_flag("--impute", config.impute, "Gibbs updates for missing entries");
  cmd->add_flag("--z-score", config.zscore, "z-score columns before fitting");
  cmd->add_flag("--record-z", config.record_z, "include Z in every sample record");
}

}  // namespace

int main(int argc, char** argv) {
  ddibp::RunConfig config;
  const std::string config_path = find_config_path(argc, argv);
  if (!config_path.empty()) {
    try {
      config = ddibp::RunConfig::load_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"distance dependent Indian buffet process toolkit"};
  app.require_subcommand(1);

  CLI::App* simulate = app.add_subcommand("simulate", "draw prior samples and sharing heatmaps");
  add_common(simulate, config);
  add_model(simulate, config);
  simulate->add_option("--draws", config.draws, "number of prior draws");
  simulate->add_option("--n", config.n, "customers when no distances are given");

  CLI::App* fit = app.add_subcommand("fit", "run the MCMC sampler on a data set");
  add_common(fit, config);
  add_model(fit, config);
  add_mcmc(fit, config);

  CLI::App* impute = app.add_subcommand("impute", "fit with missing-data Gibbs updates");
  add_common(impute, config);
  add_model(impute, config);
  add_mcmc(impute, config);
  impute->add_option("--truth", config.truth_path, "ground-truth CSV for error reporting");
  impute->add_option("--beta-sweep", config.beta_sweep, "run once per beta (0 = constant decay)");

  CLI::App* verify = app.add_subcommand("verify", "run the statistical verification suite");
  add_common(verify, config);
  verify->add_flag("--quick", config.quick, "exact small-instance checks only (seconds)");
  verify->add_option("--inject", config.inject,
                     "perturb the named check's reference by 10% (must then fail)");

  CLI::App* sharing = app.add_subcommand("sharing", "feature-sharing analytics exports");
  add_common(sharing, config);
  add_model(sharing, config);
  sharing->add_option("--draws", config.draws, "dHBP draws per grid point");
  sharing->add_option("--n", config.n, "customers when no distances are given");
  sharing->add_option("--max-r", config.max_r, "largest shared count in the PMF table");
  sharing->add_option("--a12-grid", config.a12_grid, "two-point proximity grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (CLI::App* sub : {simulate, fit, impute, verify, sharing}) {
    if (sub->parsed()) config.subcommand = sub->get_name();
  }
  return ddibp::run_command(config);
}
