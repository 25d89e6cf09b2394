#include "hgarden/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hgarden/quadrature.hpp"

namespace hgarden {

namespace {

constexpr int kMaxPanelDepth = 60;

int panel_depth(double r) {
  double d = std::ceil(std::log2(kPi / (1.0 - r))) + 6.0;
  return static_cast<int>(std::clamp(d, 4.0, static_cast<double>(kMaxPanelDepth)));
}

// Breakpoints in psi = theta - phi on [-pi, pi], halving toward 0 (and toward +-pi).
std::vector<double> panel_breaks(double r, bool antipode) {
  int J = panel_depth(r);
  std::vector<double> b{0.0, kPi, -kPi};
  for (int j = 1; j <= J; ++j) {
    double s = std::ldexp(kPi, -j);
    b.push_back(s);
    b.push_back(-s);
    if (antipode) {
      b.push_back(kPi - s);
      b.push_back(-kPi + s);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("integral means need r in (0,1)");
}

}  // namespace

double log_integral_means(const TestMap& f, cplx p, double r, double rel_tol) {
  check_r(r);
  if (f.family() == TestMap::Family::Identity) return 0.0;
  double phi = f.rotation();
  auto lv = [&](double psi) { return std::real(p * f.log_derivative_polar(r, psi + phi)); };
  double m = std::max({lv(0.0), lv(kPi), lv(0.5 * kPi), lv(-0.5 * kPi)});
  auto g = [&](double psi) { return std::exp(lv(psi) - m); };
  double s = integrate_pieces(g, panel_breaks(r, f.singular_at_antipode()), rel_tol, 1e-300);
  return m + std::log(s / (2.0 * kPi));
}

double integral_means(const TestMap& f, cplx p, double r, double rel_tol) {
  return std::exp(log_integral_means(f, p, r, rel_tol));
}

std::vector<double> dyadic_r_grid(int j_lo, int j_hi) {
  if (j_lo < 1 || j_hi < j_lo) throw std::invalid_argument("dyadic grid needs 1 <= j_lo <= j_hi");
  std::vector<double> r;
  for (int j = j_lo; j <= j_hi; ++j) r.push_back(1.0 - std::ldexp(1.0, -j));
  return r;
}

SpectrumFit fit_beta(const TestMap& f, cplx p, const std::vector<double>& r_grid) {
  if (r_grid.size() < 3) throw std::invalid_argument("fit_beta needs at least three radii");
  double lo = 1.0, hi = 0.0;
  for (double r : r_grid) {
    check_r(r);
    lo = std::min(lo, 1.0 - r);
    hi = std::max(hi, 1.0 - r);
  }
  if (std::log2(hi / lo) < 4.0 - 1e-9) throw std::invalid_argument("fit_beta: 1-r must span at least four dyadic scales");
  std::vector<double> x, y;
  for (double r : r_grid) {
    x.push_back(-std::log1p(-r));
    y.push_back(log_integral_means(f, p, r));
  }
  SpectrumFit fit = fit_growth(x, y, {});
  fit.p = p.real();
  LinearFit lf = linear_fit(x, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - lf.intercept - lf.slope * x[i]));
  double span = x.empty() ? 0.0 : *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
  if (worst > 0.02 * span) {
    fit.warning = true;
    fit.note = "poor linearity";
  }
  if (p.imag() != 0.0) fit.note += (fit.note.empty() ? "" : "; ") + std::string("complex p, real part in p column");
  return fit;
}

std::vector<SpectrumFit> brownian_spectra(const TestMap& f, const std::vector<cplx>& p_list,
                                          const std::vector<double>& t_grid, const McConfig& cfg) {
  if (t_grid.size() < 4) throw std::invalid_argument("brownian_spectrum needs at least four grid times");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()) || !(t_grid.front() > 0.0)) {
    throw std::invalid_argument("t_grid must be positive and increasing");
  }
  if (cfg.n_paths < 2) throw std::invalid_argument("brownian_spectrum needs at least two paths");
  McConfig c = cfg;
  c.T = t_grid.back();
  auto ends = simulate_endpoints(Point::half_plane(cplx(0.0, 1.0)), c, t_grid);
  std::size_t K = t_grid.size(), N = ends.size();
  std::vector<std::vector<cplx>> logd(N, std::vector<cplx>(K));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t k = 0; k < K; ++k) logd[i][k] = f.log_derivative(Point::half_plane(ends[i][k]));
  }
  std::vector<SpectrumFit> out;
  std::vector<double> w(N);
  for (cplx p : p_list) {
    std::vector<double> lv, ls;
    bool heavy = false;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < N; ++i) w[i] = std::real(p * logd[i][k]);
      LogMean lm = log_mean_exp(w);
      lv.push_back(lm.log_mean);
      ls.push_back(lm.log_se);
      std::vector<double> a(N);
      double m = *std::max_element(w.begin(), w.end());
      for (std::size_t i = 0; i < N; ++i) a[i] = std::exp(w[i] - m);
      std::size_t top = std::max<std::size_t>(1, (N + 99) / 100);
      std::nth_element(a.begin(), a.begin() + static_cast<long>(top), a.end(), std::greater<>());
      double s_top = std::accumulate(a.begin(), a.begin() + static_cast<long>(top), 0.0);
      double s_all = std::accumulate(a.begin(), a.end(), 0.0);
      heavy = heavy || s_top > 0.5 * s_all;
    }
    SpectrumFit fit = fit_growth(t_grid, lv, ls, K / 2);
    fit.p = p.real();
    if (heavy) {
      fit.warning = true;
      fit.note = "heavy tail: top 1% of samples carry over half the mean";
    }
    if (p.imag() != 0.0) fit.note += (fit.note.empty() ? "" : "; ") + std::string("complex p, real part in p column");
    out.push_back(std::move(fit));
  }
  return out;
}

SpectrumFit brownian_spectrum(const TestMap& f, cplx p, const std::vector<double>& t_grid, const McConfig& cfg) {
  return brownian_spectra(f, {p}, t_grid, cfg).front();
}

double mdim_quadratic(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("quadratic spectrum needs c >= 0");
  if (c > 0.25) throw std::domain_error("beta(p) = c p^2 does not meet p - 1 for c > 1/4");
  // (1 - sqrt(1 - 4c)) / (2c) without cancellation
  return 2.0 / (1.0 + std::sqrt(1.0 - 4.0 * c));
}

double mdim_from_beta(const std::function<double(double)>& beta, double p_lo, double p_hi, double tol) {
  if (!(p_hi > p_lo)) throw std::invalid_argument("mdim_from_beta needs p_lo < p_hi");
  auto g = [&](double p) { return beta(p) - (p - 1.0); };
  // g > 0 at p = 0 when beta(0) = 0; scan for the first sign change
  const int n = 4000;
  double a = p_lo, ga = g(a);
  if (ga <= 0.0) throw std::domain_error("beta(p) - (p - 1) is not positive at the left end");
  double best_p = a, best_g = ga;
  for (int i = 1; i <= n; ++i) {
    double b = p_lo + (p_hi - p_lo) * i / n;
    double gb = g(b);
    if (gb < best_g) {
      best_g = gb;
      best_p = b;
    }
    if (gb <= 0.0) {
      if (gb == 0.0) return b;
      for (int it = 0; it < 200 && b - a > tol; ++it) {
        double m = 0.5 * (a + b);
        if (g(m) > 0.0) a = m; else b = m;
      }
      return 0.5 * (a + b);
    }
    a = b;
    ga = gb;
  }
  // tangency: minimise g on the bracket around the sampled minimum
  double lo = std::max(p_lo, best_p - (p_hi - p_lo) / n), hi = std::min(p_hi, best_p + (p_hi - p_lo) / n);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (g(m1) < g(m2)) hi = m2; else lo = m1;
  }
  double pm = 0.5 * (lo + hi);
  if (g(pm) <= std::sqrt(tol)) return pm;
  throw std::domain_error("beta(p) never meets p - 1 on the sampled range");
}

double mdim_from_samples(const std::vector<double>& p, const std::vector<double>& beta) {
  if (p.size() != beta.size() || p.size() < 2) throw std::invalid_argument("mdim_from_samples needs matching samples");
  if (!std::is_sorted(p.begin(), p.end())) throw std::invalid_argument("p samples must be increasing");
  auto interp = [&](double x) {
    auto it = std::upper_bound(p.begin(), p.end(), x);
    std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - p.begin()), 1, p.size() - 1);
    double t = (x - p[j - 1]) / (p[j] - p[j - 1]);
    return beta[j - 1] + t * (beta[j] - beta[j - 1]);
  };
  // exact hits on the grid (tangency at a sample) first
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && std::abs(beta[i] - (p[i] - 1.0)) <= 1e-12) return p[i];
  }
  return mdim_from_beta(interp, p.front(), p.back());
}

}  // namespace hgarden
