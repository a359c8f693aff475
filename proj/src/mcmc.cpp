#include "ddibp/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "ddibp/stats.hpp"

namespace ddibp {

void McmcConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("config: iterations must be >= 0");
  if (burn_in < 0 || (iterations > 0 && burn_in >= iterations)) {
    throw std::invalid_argument("config: burn_in must be < iterations");
  }
  if (!(alpha_shape > 0.0) || !(alpha_rate > 0.0)) {
    throw std::invalid_argument("config: alpha prior parameters must be positive");
  }
  if (noise_proposal_scale < 0.0) throw std::invalid_argument("config: proposal scale < 0");
  if (!update_alpha && !(fixed_alpha > 0.0)) {
    throw std::invalid_argument("config: fixed alpha must be positive");
  }
  if (!(init_sigma_x > 0.0) || !(init_sigma_w > 0.0)) {
    throw std::invalid_argument("config: initial noise scales must be positive");
  }
}

std::string to_jsonl(const SampleRecord& rec) {
  nlohmann::json j;
  j["iter"] = rec.iteration;
  j["k"] = rec.k;
  j["alpha"] = rec.alpha;
  j["sigma_x"] = rec.sigma_x;
  j["sigma_w"] = rec.sigma_w;
  j["log_joint"] = rec.log_joint;
  if (rec.z) {
    std::vector<std::string> rows;
    rows.reserve(rec.z->rows());
    for (int i = 0; i < rec.z->rows(); ++i) {
      std::string r(rec.z->cols(), '0');
      for (int k = 0; k < rec.z->cols(); ++k)
        if ((*rec.z)(i, k)) r[k] = '1';
      rows.push_back(std::move(r));
    }
    j["z"] = rows;
  }
  return j.dump();
}

std::pair<double, double> gibbs_alpha_params(const PriorState& state, const ProximityMatrix& a,
                                             double shape, double rate) {
  double lambda_sum = 0.0, hinv_sum = 0.0;
  for (int i = 0; i < state.n(); ++i) {
    lambda_sum += state.lambda(i);
    hinv_sum += 1.0 / a.h(i);
  }
  return {shape + lambda_sum, rate + hinv_sum};
}

Chain::Chain(DataMatrix data, ProximityMatrix a, McmcConfig config)
    : a_(std::move(a)), config_(std::move(config)) {
  config_.validate();
  if (data.n() != a_.n()) throw std::invalid_argument("Chain: data/proximity dimension mismatch");
  state_.data = std::move(data);
  state_.noise.sigma_x = config_.init_sigma_x;
  state_.noise.sigma_w = config_.init_sigma_w;
}

double Chain::eval_loglik(const FeatureMatrix& z) const {
  if (config_.flat_likelihood) return 0.0;
  return collapsed_loglik(state_.data, z, state_.noise);
}

void Chain::refresh_caches() {
  state_.lp_lambda = log_prior_lambda(state_.prior_state, a_, state_.alpha);
  state_.lp_connections = log_prior_connections(state_.prior_state, a_);
  state_.loglik = eval_loglik(state_.z);
  state_.lp_alpha = log_gamma_pdf(state_.alpha, config_.alpha_shape, config_.alpha_rate);
  state_.lp_noise = log_lognormal_pdf(state_.noise.sigma_x, kNoisePriorMu, kNoisePriorSigma) +
                    log_lognormal_pdf(state_.noise.sigma_w, kNoisePriorMu, kNoisePriorSigma);
}

void Chain::init(Rng& rng) {
  state_.alpha = config_.update_alpha ? rng.gamma(config_.alpha_shape, config_.alpha_rate)
                                      : config_.fixed_alpha;
  state_.prior_state = sample_prior(a_, state_.alpha, rng);
  state_.z = compute_feature_matrix(state_.prior_state);
  refresh_caches();
}

void Chain::init_from(const ChainState& state) {
  if (state.prior_state.n() != a_.n()) throw std::invalid_argument("init_from: dimension mismatch");
  state_ = state;
  state_.z = compute_feature_matrix(state_.prior_state);
  refresh_caches();
}

double Chain::gibbs_alpha(Rng& rng) {
  const auto [shape, rate] =
      gibbs_alpha_params(state_.prior_state, a_, config_.alpha_shape, config_.alpha_rate);
  state_.alpha = rng.gamma(shape, rate);
  state_.lp_lambda = log_prior_lambda(state_.prior_state, a_, state_.alpha);
  state_.lp_alpha = log_gamma_pdf(state_.alpha, config_.alpha_shape, config_.alpha_rate);
  return state_.alpha;
}

void Chain::connection_classes(int customer, int dish, Eigen::VectorXi& reach_class,
                               Eigen::MatrixXi& z_reach, Eigen::MatrixXi& z_noreach) {
  const int n = state_.prior_state.n();
  const int owner = state_.prior_state.owner_of(dish);
  const Eigen::MatrixXi& conn = state_.prior_state.connections();

  // Reverse adjacency over every edge except the owner's (always ignored)
  // and the customer's own (being resampled).
  static thread_local std::vector<int> head, next, stack;
  head.assign(n, -1);
  next.assign(n, -1);
  for (int m = 0; m < n; ++m) {
    if (m == owner || m == customer) continue;
    const int j = conn(m, dish);
    next[m] = head[j];
    head[j] = m;
  }
  auto reverse_reach = [&](int target, Eigen::VectorXi& out) {
    out.setZero(n);
    out(target) = 1;
    stack.clear();
    stack.push_back(target);
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      for (int m = head[j]; m != -1; m = next[m]) {
        if (!out(m)) {
          out(m) = 1;
          stack.push_back(m);
        }
      }
    }
  };

  Eigen::VectorXi reaches_owner(n), reaches_customer(n);
  reverse_reach(owner, reaches_owner);      // reach o avoiding i's edge
  reverse_reach(customer, reaches_customer);  // reach i (then i's edge decides)

  // Candidate target j puts i in the reaching class iff j itself reaches the
  // owner without using i's edge.
  reach_class = reaches_owner;

  z_noreach = state_.z.z.col(dish);
  z_reach = state_.z.z.col(dish);
  for (int m = 0; m < n; ++m) {
    const bool no = reaches_owner(m) != 0;
    z_noreach(m, 0) = no ? 1 : 0;
    z_reach(m, 0) = (no || m == customer || reaches_customer(m)) ? 1 : 0;
  }
}

void Chain::gibbs_connection(int customer, int dish, Rng& rng) {
  const int n = state_.prior_state.n();
  const int owner = state_.prior_state.owner_of(dish);
  const int old_target = state_.prior_state.connection(customer, dish);

  // The owner's own edge never affects Z: prior-only draw.
  if (customer == owner) {
    const int j = rng.categorical_row(a_.matrix(), customer);
    state_.prior_state.set_connection(customer, dish, j);
    state_.lp_connections += a_.log_a(customer, j) - a_.log_a(customer, old_target);
    return;
  }

  Eigen::VectorXi reach_class;
  Eigen::MatrixXi col_reach, col_noreach;
  connection_classes(customer, dish, reach_class, col_reach, col_noreach);

  int chosen;
  bool chosen_reach;
  if (config_.flat_likelihood) {
    chosen = rng.categorical_row(a_.matrix(), customer);
    chosen_reach = reach_class(chosen) != 0;
  } else {
    // Only two likelihood values occur; the current state already carries one.
    const bool current_reach = reach_class(old_target) != 0;
    FeatureMatrix alt = state_.z;
    alt.z.col(dish) = current_reach ? col_noreach.col(0) : col_reach.col(0);
    const double loglik_alt = collapsed_loglik(state_.data, alt, state_.noise);
    const double loglik_reach = current_reach ? state_.loglik : loglik_alt;
    const double loglik_noreach = current_reach ? loglik_alt : state_.loglik;

    double mass_reach = 0.0, mass_noreach = 0.0;
    for (int j = 0; j < n; ++j) {
      (reach_class(j) ? mass_reach : mass_noreach) += a_(customer, j);
    }
    // log-space class choice.
    const double w_reach =
        mass_reach > 0.0 ? std::log(mass_reach) + loglik_reach
                         : -std::numeric_limits<double>::infinity();
    const double w_noreach =
        mass_noreach > 0.0 ? std::log(mass_noreach) + loglik_noreach
                           : -std::numeric_limits<double>::infinity();
    const double wmax = std::max(w_reach, w_noreach);
    const double p_reach = std::exp(w_reach - wmax) /
                           (std::exp(w_reach - wmax) + std::exp(w_noreach - wmax));
    chosen_reach = rng.bernoulli(p_reach);

    // Target within the class, proportional to the proximity row.
    double mass = chosen_reach ? mass_reach : mass_noreach;
    double u = rng.uniform() * mass;
    chosen = -1;
    for (int j = 0; j < n; ++j) {
      if ((reach_class(j) != 0) != chosen_reach) continue;
      u -= a_(customer, j);
      if (u < 0.0) {
        chosen = j;
        break;
      }
    }
    if (chosen < 0) {
      for (int j = n - 1; j >= 0; --j) {
        if ((reach_class(j) != 0) == chosen_reach && a_(customer, j) > 0.0) {
          chosen = j;
          break;
        }
      }
    }
    state_.loglik = chosen_reach ? loglik_reach : loglik_noreach;
  }

  state_.prior_state.set_connection(customer, dish, chosen);
  state_.lp_connections += a_.log_a(customer, chosen) - a_.log_a(customer, old_target);
  state_.z.z.col(dish) = chosen_reach ? col_reach.col(0) : col_noreach.col(0);
}

Eigen::VectorXd Chain::connection_conditional(int customer, int dish) {
  const int n = state_.prior_state.n();
  const int owner = state_.prior_state.owner_of(dish);
  Eigen::VectorXd probs(n);
  if (customer == owner || config_.flat_likelihood) {
    for (int j = 0; j < n; ++j) probs(j) = a_(customer, j);
    return probs / probs.sum();
  }
  Eigen::VectorXi reach_class;
  Eigen::MatrixXi col_reach, col_noreach;
  connection_classes(customer, dish, reach_class, col_reach, col_noreach);
  FeatureMatrix zr = state_.z, zn = state_.z;
  zr.z.col(dish) = col_reach.col(0);
  zn.z.col(dish) = col_noreach.col(0);
  const double lr = collapsed_loglik(state_.data, zr, state_.noise);
  const double ln = collapsed_loglik(state_.data, zn, state_.noise);
  const double lmax = std::max(lr, ln);
  for (int j = 0; j < n; ++j) {
    probs(j) = a_(customer, j) * std::exp((reach_class(j) ? lr : ln) - lmax);
  }
  return probs / probs.sum();
}

bool Chain::mh_ownership(Rng& rng) {
  const int n = state_.prior_state.n();
  std::vector<int> lambda_new(n);
  for (int i = 0; i < n; ++i) lambda_new[i] = rng.poisson(state_.alpha / a_.h(i));

  PriorState proposal = state_.prior_state;
  for (int i = 0; i < n; ++i) {
    const int cur = proposal.lambda(i);
    if (lambda_new[i] > cur) {
      const int add = lambda_new[i] - cur;
      Eigen::MatrixXi cols(n, add);
      for (int c = 0; c < add; ++c)
        for (int m = 0; m < n; ++m) cols(m, c) = rng.categorical_row(a_.matrix(), m);
      proposal.insert_dishes(i, cols);
    } else if (lambda_new[i] < cur) {
      // Uniform without replacement among customer i's dishes.
      const int remove = cur - lambda_new[i];
      std::vector<int> pool = proposal.owned_set(i);
      for (int c = 0; c < remove; ++c) {
        const int pick = c + rng.uniform_int(static_cast<int>(pool.size()) - c);
        std::swap(pool[c], pool[pick]);
      }
      pool.resize(remove);
      proposal.remove_dishes(std::move(pool));
    }
  }

  FeatureMatrix z_new = compute_feature_matrix(proposal);
  const double loglik_new = config_.flat_likelihood
                                ? 0.0
                                : collapsed_loglik(state_.data, z_new, state_.noise);
  const double log_zeta = loglik_new - state_.loglik;
  const bool accept = log_zeta >= 0.0 || rng.bernoulli(std::exp(log_zeta));
  if (accept) {
    state_.prior_state = std::move(proposal);
    state_.z = std::move(z_new);
    state_.loglik = loglik_new;
    state_.lp_lambda = log_prior_lambda(state_.prior_state, a_, state_.alpha);
    state_.lp_connections = log_prior_connections(state_.prior_state, a_);
  }
  return accept;
}

namespace {

// Shared body for the two noise scales: symmetric random walk on log sigma
// with the log-normal hyperprior expressed in log space.
struct NoiseProposal {
  double value;
  double log_prior_delta;
};

NoiseProposal propose_log_scale(double current, double scale, Rng& rng) {
  const double theta = std::log(current);
  const double theta_new = theta + scale * rng.normal();
  const double lp = -0.5 * (theta_new * theta_new - theta * theta) /
                    (kNoisePriorSigma * kNoisePriorSigma);
  return {std::exp(theta_new), lp};
}

}  // namespace

bool Chain::mh_noise_sigma_x(Rng& rng) {
  const NoiseProposal prop =
      propose_log_scale(state_.noise.sigma_x, config_.noise_proposal_scale, rng);
  NoiseParams cand = state_.noise;
  cand.sigma_x = prop.value;
  const double loglik_new =
      config_.flat_likelihood ? 0.0 : collapsed_loglik(state_.data, state_.z, cand);
  const double log_ratio = loglik_new - state_.loglik + prop.log_prior_delta;
  if (log_ratio >= 0.0 || rng.bernoulli(std::exp(log_ratio))) {
    state_.noise = cand;
    state_.loglik = loglik_new;
    state_.lp_noise = log_lognormal_pdf(state_.noise.sigma_x, kNoisePriorMu, kNoisePriorSigma) +
                      log_lognormal_pdf(state_.noise.sigma_w, kNoisePriorMu, kNoisePriorSigma);
    return true;
  }
  return false;
}

bool Chain::mh_noise_sigma_w(Rng& rng) {
  const NoiseProposal prop =
      propose_log_scale(state_.noise.sigma_w, config_.noise_proposal_scale, rng);
  NoiseParams cand = state_.noise;
  cand.sigma_w = prop.value;
  const double loglik_new =
      config_.flat_likelihood ? 0.0 : collapsed_loglik(state_.data, state_.z, cand);
  const double log_ratio = loglik_new - state_.loglik + prop.log_prior_delta;
  if (log_ratio >= 0.0 || rng.bernoulli(std::exp(log_ratio))) {
    state_.noise = cand;
    state_.loglik = loglik_new;
    state_.lp_noise = log_lognormal_pdf(state_.noise.sigma_x, kNoisePriorMu, kNoisePriorSigma) +
                      log_lognormal_pdf(state_.noise.sigma_w, kNoisePriorMu, kNoisePriorSigma);
    return true;
  }
  return false;
}

void Chain::sample_missing_step(Rng& rng) {
  if (!state_.data.has_missing()) return;
  state_.data = sample_missing(state_.data, state_.z, state_.noise, rng);
  state_.loglik = eval_loglik(state_.z);
}

void Chain::sweep(Rng& rng) {
  if (config_.update_alpha) gibbs_alpha(rng);
  // Owned-dish connection scan: owners in customer order, customers within.
  for (int owner = 0; owner < state_.prior_state.n(); ++owner) {
    const int first = state_.prior_state.owned_first(owner);
    const int count = state_.prior_state.lambda(owner);
    for (int i = 0; i < state_.prior_state.n(); ++i) {
      for (int d = first; d < first + count; ++d) gibbs_connection(i, d, rng);
    }
  }
  mh_ownership(rng);
  if (config_.update_noise) {
    mh_noise_sigma_x(rng);
    mh_noise_sigma_w(rng);
  }
  if (config_.update_missing) sample_missing_step(rng);
  if (config_.check_consistency) check_consistency_or_throw();
}

double Chain::recompute_log_joint() {
  state_.z = compute_feature_matrix(state_.prior_state);
  refresh_caches();
  return state_.log_joint();
}

void Chain::check_consistency_or_throw() {
  const ChainState snapshot = state_;
  const double cached = state_.log_joint();
  const double fresh = recompute_log_joint();
  if (std::fabs(cached - fresh) > 1e-8 * std::max(1.0, std::fabs(fresh))) {
    throw std::logic_error("chain log-joint cache drifted: cached=" + std::to_string(cached) +
                           " fresh=" + std::to_string(fresh));
  }
  if ((snapshot.z.z - state_.z.z).cwiseAbs().sum() != 0) {
    throw std::logic_error("chain feature matrix cache inconsistent");
  }
}

std::vector<SampleRecord> Chain::run(Rng& rng) {
  std::vector<SampleRecord> records;
  records.reserve(config_.iterations);
  map_state_ = state_;
  has_map_ = true;
  for (int it = 1; it <= config_.iterations; ++it) {
    sweep(rng);
    SampleRecord rec;
    rec.iteration = it;
    rec.k = static_cast<int>(state_.z.active_columns.size());
    rec.alpha = state_.alpha;
    rec.sigma_x = state_.noise.sigma_x;
    rec.sigma_w = state_.noise.sigma_w;
    rec.log_joint = state_.log_joint();
    if (config_.record_z) rec.z = state_.z.z;
    records.push_back(std::move(rec));
    if (state_.log_joint() > map_state_.log_joint()) map_state_ = state_;
  }
  return records;
}

RunResult run_chain(const DataMatrix& x, const DistanceMatrix& d, const DecayFunction& f,
                    const McmcConfig& config) {
  ProximityMatrix a = build_proximity(d, f);
  Chain chain(x, a, config);
  Rng rng(config.seed);
  chain.init(rng);
  RunResult result;
  result.records = chain.run(rng);
  result.map_state = chain.map_state();
  result.map_z = compute_feature_matrix(result.map_state.prior_state);
  return result;
}

void save_checkpoint(const ChainState& state, const std::string& path) {
  nlohmann::json j;
  j["alpha"] = state.alpha;
  j["sigma_x"] = state.noise.sigma_x;
  j["sigma_w"] = state.noise.sigma_w;
  j["n"] = state.prior_state.n();
  j["owner"] = state.prior_state.owner();
  std::vector<std::vector<int>> conn(state.prior_state.n());
  for (int i = 0; i < state.prior_state.n(); ++i) {
    conn[i].resize(state.prior_state.k());
    for (int k = 0; k < state.prior_state.k(); ++k) conn[i][k] = state.prior_state.connection(i, k);
  }
  j["connections"] = conn;
  std::vector<std::vector<double>> x(state.data.n());
  std::vector<std::vector<bool>> miss(state.data.n());
  for (int i = 0; i < state.data.n(); ++i) {
    x[i].resize(state.data.m());
    miss[i].resize(state.data.m());
    for (int m = 0; m < state.data.m(); ++m) {
      x[i][m] = state.data.x(i, m);
      miss[i][m] = state.data.missing(i, m);
    }
  }
  j["data"] = x;
  j["missing"] = miss;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump() << "\n";
}

ChainState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  ChainState state;
  state.alpha = j.at("alpha").get<double>();
  state.noise.sigma_x = j.at("sigma_x").get<double>();
  state.noise.sigma_w = j.at("sigma_w").get<double>();
  const int n = j.at("n").get<int>();
  const auto owner = j.at("owner").get<std::vector<int>>();
  const auto conn = j.at("connections").get<std::vector<std::vector<int>>>();
  Eigen::MatrixXi c(n, static_cast<int>(owner.size()));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < c.cols(); ++k) c(i, k) = conn[i][k];
  state.prior_state = PriorState::canonicalize(n, owner, c);
  const auto x = j.at("data").get<std::vector<std::vector<double>>>();
  const auto miss = j.at("missing").get<std::vector<std::vector<bool>>>();
  const int m = x.empty() ? 0 : static_cast<int>(x[0].size());
  Eigen::MatrixXd xm(n, m);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mm(n, m);
  for (int i = 0; i < n; ++i)
    for (int c2 = 0; c2 < m; ++c2) {
      xm(i, c2) = x[i][c2];
      mm(i, c2) = miss[i][c2];
    }
  state.data = DataMatrix::with_mask(std::move(xm), std::move(mm));
  state.z = compute_feature_matrix(state.prior_state);
  return state;
}

}  // namespace ddibp
