#include "ddibp/runconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddibp {

const char* kVersionString = "ddibp 0.1.0";
const char* kOutdirEnvVar = "DDIBP_OUTDIR";

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << " ";
    os << v[i];
  }
  return os.str();
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) {
    // Accept comma-separated as well.
    std::stringstream ts(tok);
    std::string part;
    while (std::getline(ts, part, ',')) {
      if (!part.empty()) out.push_back(std::stod(part));
    }
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad boolean value: " + v);
}

}  // namespace

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "data.path = " << data_path << "\n";
  os << "decay.beta = " << decay_beta << "\n";
  os << "decay.kind = " << decay_kind << "\n";
  os << "decay.nu = " << decay_nu << "\n";
  os << "dhbp.c0 = " << c0 << "\n";
  os << "dhbp.c1 = " << c1 << "\n";
  os << "dhbp.k_trunc = " << k_trunc << "\n";
  os << "distances.column = " << distance_column << "\n";
  os << "distances.kind = " << distance_kind << "\n";
  os << "distances.path = " << distances_path << "\n";
  os << "mcmc.alpha = " << alpha << "\n";
  os << "mcmc.alpha_rate = " << alpha_rate << "\n";
  os << "mcmc.alpha_shape = " << alpha_shape << "\n";
  os << "mcmc.burn_in = " << burn_in << "\n";
  os << "mcmc.fix_alpha = " << (fix_alpha ? "true" : "false") << "\n";
  os << "mcmc.impute = " << (impute ? "true" : "false") << "\n";
  os << "mcmc.iterations = " << iterations << "\n";
  os << "mcmc.noise_proposal_scale = " << noise_proposal_scale << "\n";
  os << "mcmc.record_z = " << (record_z ? "true" : "false") << "\n";
  os << "mcmc.seed = " << seed << "\n";
  os << "mcmc.sigma_w = " << sigma_w << "\n";
  os << "mcmc.sigma_x = " << sigma_x << "\n";
  os << "mcmc.update_noise = " << (update_noise ? "true" : "false") << "\n";
  os << "model = " << model << "\n";
  os << "out.dir = " << out_dir << "\n";
  os << "preprocess.zscore = " << (zscore ? "true" : "false") << "\n";
  os << "sharing.a12_grid = " << join(a12_grid) << "\n";
  os << "sharing.max_r = " << max_r << "\n";
  os << "simulate.draws = " << draws << "\n";
  os << "simulate.n = " << n << "\n";
  os << "subcommand = " << subcommand << "\n";
  os << "sweep.beta = " << join(beta_sweep) << "\n";
  os << "threads = " << threads << "\n";
  os << "truth.path = " << truth_path << "\n";
  os << "verify.inject = " << inject << "\n";
  os << "verify.quick = " << (quick ? "true" : "false") << "\n";
  return os.str();
}

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (key == "data.path") data_path = value;
  else if (key == "decay.beta") decay_beta = std::stod(value);
  else if (key == "decay.kind") decay_kind = value;
  else if (key == "decay.nu") decay_nu = std::stod(value);
  else if (key == "dhbp.c0") c0 = std::stod(value);
  else if (key == "dhbp.c1") c1 = std::stod(value);
  else if (key == "dhbp.k_trunc") k_trunc = std::stoi(value);
  else if (key == "distances.column") distance_column = std::stoi(value);
  else if (key == "distances.kind") distance_kind = value;
  else if (key == "distances.path") distances_path = value;
  else if (key == "mcmc.alpha") alpha = std::stod(value);
  else if (key == "mcmc.alpha_rate") alpha_rate = std::stod(value);
  else if (key == "mcmc.alpha_shape") alpha_shape = std::stod(value);
  else if (key == "mcmc.burn_in") burn_in = std::stoi(value);
  else if (key == "mcmc.fix_alpha") fix_alpha = parse_bool(value);
  else if (key == "mcmc.impute") impute = parse_bool(value);
  else if (key == "mcmc.iterations") iterations = std::stoi(value);
  else if (key == "mcmc.noise_proposal_scale") noise_proposal_scale = std::stod(value);
  else if (key == "mcmc.record_z") record_z = parse_bool(value);
  else if (key == "mcmc.seed") seed = std::stoull(value);
  else if (key == "mcmc.sigma_w") sigma_w = std::stod(value);
  else if (key == "mcmc.sigma_x") sigma_x = std::stod(value);
  else if (key == "mcmc.update_noise") update_noise = parse_bool(value);
  else if (key == "model") model = value;
  else if (key == "out.dir") out_dir = value;
  else if (key == "preprocess.zscore") zscore = parse_bool(value);
  else if (key == "sharing.a12_grid") a12_grid = split_doubles(value);
  else if (key == "sharing.max_r") max_r = std::stoi(value);
  else if (key == "simulate.draws") draws = std::stoi(value);
  else if (key == "simulate.n") n = std::stoi(value);
  else if (key == "subcommand") subcommand = value;
  else if (key == "sweep.beta") beta_sweep = split_doubles(value);
  else if (key == "threads") threads = std::stoi(value);
  else if (key == "truth.path") truth_path = value;
  else if (key == "verify.inject") inject = value;
  else if (key == "verify.quick") quick = parse_bool(value);
  else throw std::invalid_argument("unknown config key: " + key);
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    config.apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return config;
}

std::uint64_t RunConfig::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

void RunConfig::validate() const {
  if (model != "ddibp" && model != "ibp" && model != "dhbp") {
    throw std::invalid_argument("config key model: must be ddibp, ibp or dhbp (got '" + model +
                                "')");
  }
  if (decay_kind != "constant" && decay_kind != "exponential" && decay_kind != "logistic" &&
      decay_kind != "window") {
    throw std::invalid_argument("config key decay.kind: unknown kind '" + decay_kind + "'");
  }
  if (distance_kind != "matrix" && distance_kind != "absolute-difference" &&
      distance_kind != "sequential-absolute-difference") {
    throw std::invalid_argument("config key distances.kind: unknown kind '" + distance_kind + "'");
  }
  if (iterations < 0) throw std::invalid_argument("config key mcmc.iterations: must be >= 0");
  if (burn_in < 0 || (iterations > 0 && burn_in >= iterations)) {
    throw std::invalid_argument("config key mcmc.burn_in: must be in [0, iterations)");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("config key mcmc.alpha: must be positive");
  if (!(alpha_shape > 0.0) || !(alpha_rate > 0.0)) {
    throw std::invalid_argument("config key mcmc.alpha_shape/alpha_rate: must be positive");
  }
  if (!(sigma_x > 0.0) || !(sigma_w > 0.0)) {
    throw std::invalid_argument("config key mcmc.sigma_x/sigma_w: must be positive");
  }
  if (draws < 1) throw std::invalid_argument("config key simulate.draws: must be >= 1");
  if (n < 1) throw std::invalid_argument("config key simulate.n: must be >= 1");
  if (k_trunc < 1) throw std::invalid_argument("config key dhbp.k_trunc: must be >= 1");
  for (double b : beta_sweep) {
    if (b < 0.0) throw std::invalid_argument("config key sweep.beta: values must be >= 0");
  }
  for (double a12 : a12_grid) {
    if (a12 < 0.0 || a12 > 1.0) {
      throw std::invalid_argument("config key sharing.a12_grid: values must lie in [0, 1]");
    }
  }
}

std::string resolve_out_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv(kOutdirEnvVar); env && *env) return env;
  return "out";
}

}  // namespace ddibp
