#pragma once

#include <functional>
#include <vector>

namespace ddibp {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased, n-1

double log_poisson_pmf(int k, double mean);
double poisson_pmf(int k, double mean);
double poisson_cdf(int k, double mean);

double log_gamma_pdf(double x, double shape, double rate);
// log N(log x; mu, sigma^2) - log x, the density of a log-normal in x.
double log_lognormal_pdf(double x, double mu, double sigma);

// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi_squared_sf(double stat, int dof);  // upper tail

// Goodness-of-fit p-value for observed counts against expected probabilities.
// Cells with expected count below min_expected are merged into their right
// neighbor (the final cell absorbs the tail).
double chi_squared_gof_pvalue(const std::vector<long long>& counts,
                              const std::vector<double>& probs,
                              long long total, double min_expected = 5.0);

// One-sample Kolmogorov-Smirnov against a continuous cdf; asymptotic p-value.
double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf);

// Standard error of the mean of a correlated sequence via batch means.
double batch_means_se(const std::vector<double>& x, int n_batches = 50);

struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;  // OLS standard error of the slope
};
SlopeFit ols_slope(const std::vector<double>& y);  // regress on 0..n-1

}  // namespace ddibp
