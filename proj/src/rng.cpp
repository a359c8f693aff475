#include "ddibp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ddibp {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  // Mix the stream id through a second splitmix pass so nearby ids decorrelate.
  std::uint64_t y = a ^ (stream * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  return Rng(splitmix64(y));
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  // Rejection to kill modulo bias.
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return static_cast<int>(r % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::exponential() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return -std::log(u);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0) throw std::domain_error("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^{1/a}.
    const double g = gamma(shape + 1.0, 1.0);
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double Rng::beta(double a, double b) {
  if (a <= 0.0 && b <= 0.0) throw std::domain_error("beta: degenerate shapes");
  if (a <= 0.0) return 0.0;
  if (b <= 0.0) return 1.0;
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  if (x + y == 0.0) return a / (a + b);  // both underflowed; return the mean
  return x / (x + y);
}

int Rng::poisson(double mean) {
  if (mean < 0.0) throw std::domain_error("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Sequential inversion on the cdf recurrence.
    const double l = std::exp(-mean);
    int k = 0;
    double p = l;
    double u = uniform();
    while (u > p && k < 1000) {
      ++k;
      u -= p;
      p *= mean / k;
    }
    return k;
  }
  // Hörmann (1993) PTRS.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<int>(kf);
    }
  }
}

int Rng::categorical(const Eigen::VectorXd& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::domain_error("categorical: weights must have positive sum");
  double u = uniform() * total;
  for (int i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return static_cast<int>(weights.size()) - 1;
}

int Rng::categorical_row(const Eigen::MatrixXd& m, int row) {
  double u = uniform() * m.row(row).sum();
  const int n = static_cast<int>(m.cols());
  for (int j = 0; j < n; ++j) {
    u -= m(row, j);
    if (u < 0.0) return j;
  }
  // Falls through only on the zero-probability tail of rounding; return the
  // last positive entry.
  for (int j = n - 1; j >= 0; --j)
    if (m(row, j) > 0.0) return j;
  return n - 1;
}

}  // namespace ddibp
