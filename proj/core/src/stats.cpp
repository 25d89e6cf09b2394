#include "hgarden/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hgarden {

Estimate mean_estimate(const std::vector<double>& xs) {
  Estimate e;
  e.n_samples = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  e.value = mean;
  if (xs.size() > 1) {
    double n = static_cast<double>(xs.size());
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
  if (!weights.empty() && weights.size() != x.size()) throw std::invalid_argument("linear_fit weight size mismatch");
  std::size_t n = x.size();
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w(i) * (x[i] - mx) * (x[i] - mx);
    sxy += w(i) * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += w(i) * r * r;
  }
  if (weights.empty()) {
    double s2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
    f.residual_sd = std::sqrt(s2);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / sw + mx * mx / sxx));
  } else {
    // known variances
    f.residual_sd = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2)) : 0.0;
    f.slope_se = std::sqrt(1.0 / sxx);
    f.intercept_se = std::sqrt(1.0 / sw + mx * mx / sxx);
  }
  return f;
}

SpectrumFit fit_growth(const std::vector<double>& x, const std::vector<double>& log_values,
                       const std::vector<double>& log_se, std::size_t first) {
  if (x.size() != log_values.size() || (!log_se.empty() && log_se.size() != x.size())) {
    throw std::invalid_argument("fit_growth: size mismatch");
  }
  if (x.size() < first + 2) throw std::invalid_argument("fit_growth: need at least two fitted points");
  SpectrumFit f;
  f.abscissa = x;
  f.log_values = log_values;
  f.log_se = log_se.empty() ? std::vector<double>(x.size(), 0.0) : log_se;
  for (std::size_t i = 0; i < x.size(); ++i) f.per_point_rate.push_back(x[i] != 0.0 ? log_values[i] / x[i] : 0.0);
  std::vector<double> xs(x.begin() + static_cast<long>(first), x.end());
  std::vector<double> ys(log_values.begin() + static_cast<long>(first), log_values.end());
  LinearFit lf = linear_fit(xs, ys);
  double mx = 0.0;
  for (double v : xs) mx += v;
  mx /= static_cast<double>(xs.size());
  double sxx = 0.0;
  for (double v : xs) sxx += (v - mx) * (v - mx);
  double mc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double c = (xs[i] - mx) / sxx;
    double s = f.log_se[first + i];
    mc += c * c * s * s;
  }
  f.beta_hat = lf.slope;
  f.se = std::sqrt(lf.slope_se * lf.slope_se + mc);
  f.ci_lo = f.beta_hat - 1.959963984540054 * f.se;
  f.ci_hi = f.beta_hat + 1.959963984540054 * f.se;
  return f;
}

double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

LogMean log_mean_exp(const std::vector<double>& w) {
  if (w.empty()) throw std::invalid_argument("log_mean_exp on empty sample");
  LogMean r;
  double m = *std::max_element(w.begin(), w.end());
  double n = static_cast<double>(w.size());
  double s = 0.0;
  for (double v : w) s += std::exp(v - m);
  double mean_a = s / n;
  double ss = 0.0;
  for (double v : w) {
    double d = std::exp(v - m) - mean_a;
    ss += d * d;
  }
  double sd_a = w.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  r.log_mean = m + std::log(mean_a);
  r.log_se = sd_a / (mean_a * std::sqrt(n));
  r.mean = std::exp(r.log_mean);
  r.se = r.mean * r.log_se;
  return r;
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_statistic on empty sample");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double F = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lam * lam);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, rate * x);
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  double frac = pos - static_cast<double>(i);
  return xs[i] + frac * (xs[i + 1] - xs[i]);
}

double t_critical(double confidence, double dof) {
  if (!(dof > 0.0)) return 1.959963984540054;
  boost::math::students_t dist(dof);
  return boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
}

}  // namespace hgarden
