#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hgarden {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double t = 0.0;
  std::string config_digest;
  std::uint64_t seed = 0;
};

// Mean and standard error of the mean, summed in index order.
Estimate mean_estimate(const std::vector<double>& xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double residual_sd = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares; with weights, weighted least squares with w_i = 1/sigma_i^2.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights = {});

// Exponential growth rate fitted as the slope of log-values against time (or log scale).
struct SpectrumFit {
  double p = 0.0;
  double beta_hat = 0.0;
  double se = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  std::vector<double> abscissa;
  std::vector<double> log_values;
  std::vector<double> log_se;
  std::vector<double> per_point_rate;  // log_value / abscissa
  bool warning = false;
  std::string note;
};

// Slope over the points with index >= first (all when first = 0); 95% CI combines the
// regression residual error with the propagated per-point standard errors.
SpectrumFit fit_growth(const std::vector<double>& x, const std::vector<double>& log_values,
                       const std::vector<double>& log_se, std::size_t first = 0);

double log_sum_exp(const std::vector<double>& xs);

// log of the sample mean of exp(w) and its delta-method standard error.
struct LogMean {
  double log_mean = 0.0;
  double log_se = 0.0;
  double mean = 0.0;
  double se = 0.0;
};
LogMean log_mean_exp(const std::vector<double>& w);

// Sup-distance between the empirical CDF of xs and cdf.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);
// Asymptotic Kolmogorov p-value for statistic d with n samples.
double ks_pvalue(double d, std::size_t n);

double gamma_cdf(double x, double shape, double rate);

// Linear-interpolated empirical quantile, q in [0,1].
double quantile(std::vector<double> xs, double q);

// Student t critical value for a two-sided interval at the given confidence.
double t_critical(double confidence, double dof);

}  // namespace hgarden
