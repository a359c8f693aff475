#include "ddibp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddibp {

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double log_poisson_pmf(int k, double mean) {
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double poisson_pmf(int k, double mean) { return std::exp(log_poisson_pmf(k, mean)); }

double poisson_cdf(int k, double mean) {
  if (k < 0) return 0.0;
  // P(X <= k) = Q(k+1, mean).
  return gamma_q(k + 1.0, mean);
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_lognormal_pdf(double x, double mu, double sigma) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  const double z = (std::log(x) - mu) / sigma;
  return -0.5 * z * z - std::log(x * sigma) - 0.5 * std::log(2.0 * M_PI);
}

namespace {

// Series expansion for P(a, x), x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_squared_sf(double stat, int dof) {
  if (dof <= 0) throw std::domain_error("chi_squared_sf: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * stat);
}

double chi_squared_gof_pvalue(const std::vector<long long>& counts,
                              const std::vector<double>& probs,
                              long long total, double min_expected) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw std::invalid_argument("chi_squared_gof_pvalue: size mismatch");
  }
  // Merge low-expectation cells left to right; the last merged cell keeps
  // accumulating, so the distribution tail ends up pooled.
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    o_acc += static_cast<double>(counts[i]);
    e_acc += probs[i] * static_cast<double>(total);
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  if (exp.size() < 2) return 1.0;
  double stat = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    const double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  return chi_squared_sf(stat, static_cast<int>(exp.size()) - 1);
}

double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) return 1.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  // Kolmogorov asymptotic tail with the Stephens small-sample correction.
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double batch_means_se(const std::vector<double>& x, int n_batches) {
  const int n = static_cast<int>(x.size());
  if (n < 2 * n_batches) n_batches = std::max(2, n / 2);
  const int batch = n / n_batches;
  std::vector<double> bm;
  bm.reserve(n_batches);
  for (int b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (int i = b * batch; i < (b + 1) * batch; ++i) s += x[i];
    bm.push_back(s / batch);
  }
  return std::sqrt(variance(bm) / static_cast<double>(n_batches));
}

SlopeFit ols_slope(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  SlopeFit fit;
  if (n < 3) return fit;
  const double xbar = (n - 1) / 2.0;
  const double ybar = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (i - xbar) * (i - xbar);
    sxy += (i - xbar) * (y[i] - ybar);
  }
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - ybar - fit.slope * (i - xbar);
    rss += r * r;
  }
  fit.se = std::sqrt(rss / (n - 2) / sxx);
  return fit;
}

}  // namespace ddibp
