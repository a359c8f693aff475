#include "ddibp/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "ddibp/csv.hpp"
#include "ddibp/mcmc.hpp"
#include "ddibp/theory.hpp"
#include "ddibp/verify.hpp"

namespace ddibp {

namespace {

namespace fs = std::filesystem;

DecayFunction make_decay(const RunConfig& config) {
  return DecayFunction::from_spec(config.decay_kind, config.decay_beta, config.decay_nu);
}

DistanceMatrix build_distances(const RunConfig& config, int expected_n) {
  if (config.distances_path.empty()) {
    if (expected_n < 1) throw std::invalid_argument("distances.path: required for this run");
    return DistanceMatrix::sequential(expected_n);
  }
  const Eigen::MatrixXd raw = read_matrix_csv(config.distances_path);
  DistanceMatrix d = [&] {
    if (config.distance_kind == "matrix") return DistanceMatrix(raw);
    if (config.distance_column < 0 || config.distance_column >= raw.cols()) {
      throw std::invalid_argument("distances.column: out of range for " + config.distances_path);
    }
    const Eigen::VectorXd covariate = raw.col(config.distance_column);
    return config.distance_kind == "absolute-difference"
               ? DistanceMatrix::absolute_difference(covariate)
               : DistanceMatrix::sequential_absolute_difference(covariate);
  }();
  if (expected_n > 0 && d.n() != expected_n) {
    throw std::invalid_argument("distances.path: " + std::to_string(d.n()) +
                                " customers but data has " + std::to_string(expected_n) +
                                " rows");
  }
  return d;
}

DataMatrix load_data(const RunConfig& config) {
  if (config.data_path.empty()) throw std::invalid_argument("data.path: required");
  DataMatrix data = read_data_csv(config.data_path);
  if (config.zscore) {
    for (int j = 0; j < data.m(); ++j) {
      double s = 0.0, s2 = 0.0;
      int count = 0;
      for (int i = 0; i < data.n(); ++i) {
        if (data.missing(i, j)) continue;
        s += data.x(i, j);
        s2 += data.x(i, j) * data.x(i, j);
        ++count;
      }
      if (count < 2) continue;
      const double m = s / count;
      const double sd = std::sqrt(std::max((s2 - count * m * m) / (count - 1), 1e-12));
      for (int i = 0; i < data.n(); ++i) {
        if (!data.missing(i, j)) data.x(i, j) = (data.x(i, j) - m) / sd;
      }
    }
  }
  return data;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const std::string& dir, const RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ofstream out(dir + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << "version=" << kVersionString << "\n";
  out << "config_hash=" << hex64(config.hash()) << "\n";
  out << "seed=" << config.seed << "\n";
  for (const auto& [k, v] : extra) out << k << "=" << v << "\n";
  std::ofstream cfg(dir + "/config.txt");
  cfg << config.serialize();
}

std::string prepare_out_dir(const RunConfig& config) {
  const std::string dir = resolve_out_dir(config);
  fs::create_directories(dir);
  return dir;
}

McmcConfig make_mcmc_config(const RunConfig& config, bool update_missing) {
  McmcConfig mc;
  mc.iterations = config.iterations;
  mc.burn_in = config.burn_in;
  mc.seed = config.seed;
  mc.alpha_shape = config.alpha_shape;
  mc.alpha_rate = config.alpha_rate;
  mc.update_alpha = !config.fix_alpha;
  mc.fixed_alpha = config.alpha;
  mc.init_sigma_x = config.sigma_x;
  mc.init_sigma_w = config.sigma_w;
  mc.update_noise = config.update_noise;
  mc.noise_proposal_scale = config.noise_proposal_scale;
  mc.update_missing = update_missing;
  mc.record_z = config.record_z;
  return mc;
}

void write_trace(const std::string& path, const std::vector<SampleRecord>& records) {
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({static_cast<double>(r.iteration), static_cast<double>(r.k), r.alpha,
                    r.sigma_x, r.sigma_w, r.log_joint});
  }
  write_table_csv(path, {"iteration", "k", "alpha", "sigma_x", "sigma_w", "log_joint"}, rows);
}

void write_samples(const std::string& path, const std::vector<SampleRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : records) out << to_jsonl(r) << "\n";
}

struct FitArtifacts {
  RunResult run;
  DistanceMatrix distances;
  DecayFunction decay;
};

FitArtifacts run_fit(const RunConfig& config, DataMatrix data, bool update_missing) {
  const bool ibp = config.model == "ibp";
  const DistanceMatrix d = ibp ? DistanceMatrix::sequential(data.n())
                               : build_distances(config, data.n());
  const DecayFunction f = ibp ? DecayFunction::constant() : make_decay(config);
  const McmcConfig mc = make_mcmc_config(config, update_missing);
  return {run_chain(data, d, f, mc), d, f};
}

std::vector<std::pair<std::string, std::string>> map_summary(const RunResult& run) {
  return {{"map_log_joint", format_double(run.map_state.log_joint())},
          {"map_k", std::to_string(run.map_z.k())},
          {"map_alpha", format_double(run.map_state.alpha)},
          {"map_sigma_x", format_double(run.map_state.noise.sigma_x)},
          {"map_sigma_w", format_double(run.map_state.noise.sigma_w)}};
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  const std::string dir = prepare_out_dir(config);
  const int n = config.distances_path.empty() ? config.n : -1;
  const DistanceMatrix d = build_distances(config, n);
  Eigen::MatrixXd fraction_sum;

  for (int t = 0; t < config.draws; ++t) {
    Rng rng = Rng::derive(config.seed, static_cast<std::uint64_t>(t));
    FeatureMatrix z;
    if (config.model == "ibp") {
      z = ibp_baseline_sample(config.alpha, d.n(), rng);
    } else if (config.model == "dhbp") {
      DhbpParams params{config.alpha, config.c0, config.c1, config.k_trunc};
      z = sample_dhbp(params, build_proximity(d, make_decay(config)), rng).z;
    } else {
      const ProximityMatrix a = build_proximity(d, make_decay(config));
      z = compute_feature_matrix(sample_prior(a, config.alpha, rng));
    }
    const SharingStats stats = sharing_stats(z);
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%03d.csv", t);
    write_matrix_csv(dir + "/z" + suffix, z.z);
    const Eigen::MatrixXd frac = stats.fraction_zero_diagonal();
    write_matrix_csv(dir + "/sharing" + suffix, frac);
    if (fraction_sum.size() == 0) fraction_sum = frac;
    else fraction_sum += frac;
  }
  write_matrix_csv(dir + "/sharing.csv", Eigen::MatrixXd(fraction_sum / config.draws));
  write_manifest(dir, config);
  return 0;
}

int cmd_fit(const RunConfig& config) {
  const std::string dir = prepare_out_dir(config);
  DataMatrix data = load_data(config);
  const FitArtifacts fit = run_fit(config, data, config.impute || data.has_missing());

  write_samples(dir + "/samples.jsonl", fit.run.records);
  write_trace(dir + "/trace.csv", fit.run.records);
  write_matrix_csv(dir + "/map_z.csv", fit.run.map_z.z);
  write_matrix_csv(dir + "/sharing.csv",
                   sharing_stats(fit.run.map_z).fraction_zero_diagonal());
  write_manifest(dir, config, map_summary(fit.run));
  return 0;
}

int cmd_impute(const RunConfig& config) {
  const std::string dir = prepare_out_dir(config);
  DataMatrix data = load_data(config);
  if (!data.has_missing()) {
    std::cerr << "warning: no missing entries in " << config.data_path
              << "; imputation run is degenerate\n";
  }
  const bool have_truth = !config.truth_path.empty();
  DataMatrix truth;
  if (have_truth) {
    truth = read_data_csv(config.truth_path);
    if (truth.n() != data.n() || truth.m() != data.m()) {
      throw std::invalid_argument("truth.path: shape mismatch with data");
    }
  }

  std::vector<double> betas = config.beta_sweep;
  if (betas.empty()) {
    betas.push_back(config.decay_kind == "constant" ? 0.0 : config.decay_beta);
  }

  std::vector<std::vector<double>> error_rows;
  bool first = true;
  for (double beta : betas) {
    RunConfig run_config = config;
    if (beta == 0.0) {
      run_config.decay_kind = "constant";
    } else {
      run_config.decay_kind = "exponential";
      run_config.decay_beta = beta;
    }
    const FitArtifacts fit = run_fit(run_config, data, true);
    // Masked entries are reconstructed as E[X] = Z W-bar at the MAP sample.
    const Eigen::MatrixXd x_hat = posterior_mean_reconstruction(
        fit.run.map_state.data, fit.run.map_z, fit.run.map_state.noise);
    Eigen::MatrixXd imputed = data.x;
    for (int i = 0; i < data.n(); ++i)
      for (int j = 0; j < data.m(); ++j)
        if (data.missing(i, j)) imputed(i, j) = x_hat(i, j);

    double mse = std::numeric_limits<double>::quiet_NaN();
    if (have_truth) {
      double sum = 0.0;
      int count = 0;
      for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.m(); ++j) {
          if (!data.missing(i, j)) continue;
          const double r = imputed(i, j) - truth.x(i, j);
          sum += r * r;
          ++count;
        }
      }
      if (count > 0) mse = sum / count;
    }
    error_rows.push_back({beta, mse, static_cast<double>(fit.run.map_z.k()),
                          fit.run.map_state.log_joint()});

    if (first) {
      first = false;
      write_matrix_csv(dir + "/imputed.csv", imputed);
      write_samples(dir + "/samples.jsonl", fit.run.records);
      write_trace(dir + "/trace.csv", fit.run.records);
      write_matrix_csv(dir + "/map_z.csv", fit.run.map_z.z);
      if (have_truth) {
        std::vector<std::vector<double>> residuals;
        for (int i = 0; i < data.n(); ++i) {
          for (int j = 0; j < data.m(); ++j) {
            if (!data.missing(i, j)) continue;
            residuals.push_back({static_cast<double>(i), static_cast<double>(j), imputed(i, j),
                                 truth.x(i, j), imputed(i, j) - truth.x(i, j)});
          }
        }
        write_table_csv(dir + "/residuals.csv", {"row", "col", "imputed", "truth", "residual"},
                        residuals);
      }
    }
  }
  write_table_csv(dir + "/errors.csv", {"beta", "mse", "map_k", "map_log_joint"}, error_rows);
  write_manifest(dir, config);
  return 0;
}

int cmd_verify(const RunConfig& config) {
  VerifyOptions opts;
  opts.quick = config.quick;
  opts.inject = config.inject;
  opts.threads = config.threads;
  if (config.seed != 0) opts.seed = config.seed;

  const std::vector<CheckResult> results = run_verify(opts);
  std::cout << check_result_csv_header() << "\n";
  bool all_pass = true;
  std::vector<std::vector<double>> rows;
  std::ostringstream body;
  for (const auto& r : results) {
    const std::string line = to_csv_line(r);
    std::cout << line << "\n";
    body << line << "\n";
    if (!r.pass) all_pass = false;
  }
  if (!config.out_dir.empty()) {
    const std::string dir = prepare_out_dir(config);
    std::ofstream out(dir + "/verify.csv");
    out << check_result_csv_header() << "\n" << body.str();
    write_manifest(dir, config);
  }
  std::cout << (all_pass ? "VERIFY PASS" : "VERIFY FAIL") << " (" << results.size()
            << " checks)\n";
  return all_pass ? 0 : 2;
}

int cmd_sharing(const RunConfig& config) {
  const std::string dir = prepare_out_dir(config);

  // Cor 1 limit matrix for the configured geometry.
  const int n = config.distances_path.empty() ? config.n : -1;
  const DistanceMatrix d = build_distances(config, n);
  const ProximityMatrix a = build_proximity(d, make_decay(config));
  const ReachProbs probs = a.n() <= 7
                               ? reach_probs_exact(a)
                               : reach_probs_mc(a, 1000000, config.seed + 1, config.threads);
  write_matrix_csv(dir + "/ddibp_limit.csv", ddibp_limit_fractions(a, probs));

  const DhbpLimits limits = dhbp_limit_fractions(config.c0, config.c1);
  write_table_csv(dir + "/dhbp_limits.csv", {"same_group", "diff_group"},
                  {{limits.same_group, limits.diff_group}});

  // Fig. 5 analogue: two-point PMF sweep for both models.
  std::vector<double> grid = config.a12_grid;
  if (grid.empty()) {
    for (int g = 0; g <= 10; ++g) grid.push_back(g / 10.0);
  }
  DhbpParams params{config.alpha, config.c0, config.c1, config.k_trunc};
  for (const auto& [model, file] :
       {std::pair{SharingModel::kDdibp, "pmf_ddibp.csv"},
        std::pair{SharingModel::kDhbp, "pmf_dhbp.csv"}}) {
    const auto rows = sharing_pmf_sweep(model, grid, config.alpha, config.max_r, params,
                                        config.draws, config.seed + 2);
    std::vector<std::vector<double>> table;
    for (const auto& row : rows) {
      for (int r = 0; r <= config.max_r; ++r) {
        table.push_back({row.a12, static_cast<double>(r), row.pmf[r], row.expected_r_single});
      }
    }
    write_table_csv(dir + "/" + file, {"a12", "r", "pmf", "expected_r_i"}, table);
  }
  write_manifest(dir, config);
  return 0;
}

int run_command(const RunConfig& config) {
  try {
    config.validate();
    if (config.subcommand == "simulate") return cmd_simulate(config);
    if (config.subcommand == "fit") return cmd_fit(config);
    if (config.subcommand == "impute") return cmd_impute(config);
    if (config.subcommand == "verify") return cmd_verify(config);
    if (config.subcommand == "sharing") return cmd_sharing(config);
    std::cerr << "error: unknown subcommand '" << config.subcommand << "'\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ddibp
