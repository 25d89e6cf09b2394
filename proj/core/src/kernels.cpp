#include "hgarden/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hgarden/quadrature.hpp"

namespace hgarden {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log_sinh(double x) {
  if (x > 20.0) return x - kLn2 + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

// log(cosh s - cosh rho) for s = rho + v^2.
double log_cosh_gap(double rho, double v2) {
  return kLn2 + log_sinh(rho + 0.5 * v2) + log_sinh(0.5 * v2);
}

double erfcx(double a) {
  if (a < 25.0) return std::erfc(a) * std::exp(a * a);
  double inv = 1.0 / (a * a);
  return (1.0 - 0.5 * inv * (1.0 - 1.5 * inv * (1.0 - 2.5 * inv))) / (a * std::sqrt(kPi));
}

double log_erfc(double a) {
  if (a < 25.0) return std::log(std::erfc(a));
  return std::log(erfcx(a)) - a * a;
}

// log of F_t(s) = (1/2)[e^{-s/2} erfc((s - t/2)/sqrt(2t)) + e^{s/2} erfc((s + t/2)/sqrt(2t))].
double log_partial_profile(double t, double s) {
  double q = std::sqrt(2.0 * t);
  double a1 = (s - 0.5 * t) / q;
  double a2 = (s + 0.5 * t) / q;
  double l1 = -0.5 * s + log_erfc(a1);
  double l2 = -s * s / (2.0 * t) - t / 8.0 + std::log(erfcx(a2));
  double m = std::max(l1, l2);
  return -kLn2 + m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
}

void require_time(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
}

}  // namespace

double green_inf_rho(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("green function pole at rho = 0");
  // log coth(x) = log1p(2/(e^{2x} - 1)) with x = rho/2
  return std::log1p(2.0 / std::expm1(rho)) / kPi;
}

double green_inf(const Point& x) {
  if (x.model != Model::Disk) throw ModelMismatch("green_inf(x) expects a disk point");
  double r = std::abs(x.coord);
  if (r == 0.0) throw std::domain_error("green function pole at x = 0");
  return -std::log(r) / kPi;
}

double green_inf(const Point& x, const Point& y) {
  double rho = hyp_distance(x, y);
  return green_inf_rho(rho);
}

double heat_kernel(double t, double rho, double rel_tol) {
  require_time(t);
  if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");
  double log_pref = 0.5 * kLn2 - t / 8.0 - 1.5 * std::log(2.0 * kPi * t);
  double b = rho / t + 0.5;
  double d = t * (-b + std::sqrt(b * b + 90.0 / t));
  d = std::min(d, 60.0);
  auto f = [&](double v) {
    double v2 = v * v;
    double s = rho + v2;
    double l = log_pref + std::log(s) - s * s / (2.0 * t) - 0.5 * log_cosh_gap(rho, v2);
    return 2.0 * v * std::exp(l);
  };
  double vmax = std::sqrt(d);
  return integrate(f, 0.0, vmax, rel_tol, 1e-300);
}

double heat_kernel_mass(double t, double rho_max, double rel_tol) {
  require_time(t);
  double cutoff = 0.5 * t + 12.0 * std::sqrt(t) + 10.0;
  double hi = std::min(rho_max, cutoff);
  auto f = [&](double rho) { return heat_kernel(t, rho, rel_tol * 0.1) * 2.0 * kPi * std::sinh(rho); };
  std::vector<double> br{0.0};
  double step = std::max(0.25 * std::sqrt(t), 1e-3);
  for (double x = step; x < hi; x *= 2.0) br.push_back(x);
  br.push_back(hi);
  return integrate_pieces(f, br, rel_tol, 1e-300);
}

double green_partial_rho(double t, double rho, double rel_tol) {
  if (t == kInf) return green_inf_rho(rho);
  require_time(t);
  if (!(rho > 0.0)) throw std::domain_error("green function pole at rho = 0");
  auto f = [&](double v) {
    double v2 = v * v;
    double s = rho + v2;
    double l = log_partial_profile(t, s) - 0.5 * log_cosh_gap(rho, v2);
    return 2.0 * v * std::exp(l);
  };
  // The integrand decays at least like e^{-(s - rho)}.
  double vmax = std::sqrt(45.0);
  std::vector<double> br{0.0, 0.5, 1.0, 2.0, 4.0, vmax};
  double g = integrate_pieces(f, br, rel_tol, 1e-300);
  return g / (std::sqrt(2.0) * kPi);
}

double green_partial(double t, const Point& x) {
  if (x.model != Model::Disk) throw ModelMismatch("green_partial(t, x) expects a disk point");
  double r = std::abs(x.coord);
  return green_partial_rho(t, 2.0 * std::atanh(r));
}

double green_partial(double t, const Point& x, const Point& y) {
  return green_partial_rho(t, hyp_distance(x, y));
}

double horoball_arc(double r, double h) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("radius must lie in (0,1)");
  double one_minus_r = 1.0 - r;
  if (h > 1.0 && r <= h - 1.0) return 2.0 * kPi;
  double gap = h - one_minus_r;
  if (gap <= 0.0) return 0.0;
  double c = 1.0 - 0.5 * h;
  double arg = one_minus_r * gap / (4.0 * r * c);
  return 4.0 * std::asin(std::sqrt(std::min(1.0, arg)));
}

namespace {

// Arc in terms of rho with 1 - r computed stably.
double horoball_arc_rho(double rho, double h) {
  double e = std::exp(-rho);
  double one_minus_r = 2.0 * e / (1.0 + e);
  double r = 1.0 - one_minus_r;
  if (h > 1.0 && r <= h - 1.0) return 2.0 * kPi;
  double gap = h - one_minus_r;
  if (gap <= 0.0) return 0.0;
  double c = 1.0 - 0.5 * h;
  double arg = one_minus_r * gap / (4.0 * r * c);
  return 4.0 * std::asin(std::sqrt(std::min(1.0, arg)));
}

// integral of f over [a, a + w] after rho = a + u^2, removing square-root endpoints
double integrate_sqrt_start(const Integrand& f, double a, double w, double rel_tol) {
  auto g = [&](double u) { return 2.0 * u * f(a + u * u); };
  return integrate(g, 0.0, std::sqrt(w), rel_tol, 1e-300);
}

}  // namespace

double occupation_integral_depth(double depth, double t, double rel_tol) {
  if (t != kInf) require_time(t);
  if (!std::isfinite(depth)) throw std::invalid_argument("depth must be finite");
  // Horoball seen from 0: level log(h/(2-h)) = -depth.
  double h = 2.0 / (1.0 + std::exp(depth));
  if (!(h > 0.0)) return 0.0;
  auto f = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    double arc = horoball_arc_rho(rho, h);
    if (arc == 0.0) return 0.0;
    return green_partial_rho(t, rho, rel_tol * 0.01) * arc * std::sinh(rho);
  };
  double total = 0.0;
  double start;
  if (h > 1.0) {
    double rho_full = 2.0 * std::atanh(h - 1.0);
    if (rho_full > 0.0) {
      auto full = [&](double rho) {
        if (rho <= 0.0) return 0.0;
        return green_partial_rho(t, rho, rel_tol * 0.01) * 2.0 * kPi * std::sinh(rho);
      };
      total += integrate(full, 0.0, rho_full, rel_tol, 1e-300);
    }
    start = std::max(rho_full, 0.0);
  } else {
    start = h == 1.0 ? 0.0 : std::log((2.0 - h) / h);
  }
  total += integrate_sqrt_start(f, start, 1.0, rel_tol);
  std::vector<double> br{start + 1.0, start + 4.0, start + 16.0, start + 40.0, start + 100.0};
  total += integrate_pieces(f, br, rel_tol, 1e-300);
  return total;
}

double occupation_integral(const Horoball& B, const Point& x0, double t, double rel_tol) {
  return occupation_integral_depth(horoball_distance(B, x0), t, rel_tol);
}

double annulus_occupation(double r_inner, double r_outer, double t, double rel_tol) {
  if (!(0.0 < r_inner && r_inner < r_outer && r_outer < 1.0)) {
    throw std::invalid_argument("annulus radii must satisfy 0 < r_inner < r_outer < 1");
  }
  double a = 2.0 * std::atanh(r_inner);
  double b = 2.0 * std::atanh(r_outer);
  auto f = [&](double rho) {
    return green_partial_rho(t, rho, rel_tol * 0.01) * 2.0 * kPi * std::sinh(rho);
  };
  return integrate(f, a, b, rel_tol, 1e-300);
}

KernelGrid build_kernel_grid(const std::vector<double>& times, const std::vector<double>& radii,
                             double tolerance) {
  KernelGrid g;
  g.times = times;
  g.radii = radii;
  g.tolerance = tolerance;
  for (double t : times) {
    require_time(t);
    std::vector<double> row;
    row.reserve(radii.size());
    for (double r : radii) row.push_back(heat_kernel(t, r, tolerance * 1e-2));
    g.values.push_back(std::move(row));
    double mass = heat_kernel_mass(t, kInf, tolerance * 1e-2);
    if (std::abs(mass - 1.0) > 1e-6) {
      throw QuadratureError("heat kernel mass deviates from 1", std::abs(mass - 1.0), 1e-6);
    }
    g.total_mass.push_back(mass);
  }
  return g;
}

MonotonicityReport check_ratio_monotone_annuli(double t, const std::vector<double>& r_grid,
                                               double tolerance) {
  MonotonicityReport rep;
  rep.mode = RatioMode::Annuli;
  rep.t = t;
  rep.params = r_grid;
  rep.tolerance = tolerance;
  for (double r : r_grid) {
    double rho = 2.0 * std::atanh(r);
    rep.ratios.push_back(green_partial_rho(t, rho, 1e-12) / green_inf_rho(rho));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    // relative: the ratios are computed to relative accuracy and span many decades at small t
    double m = 1.0 - rep.ratios[i] / rep.ratios[i - 1];
    rep.margins.push_back(m);
    if (!(m > tolerance)) rep.monotone = false;
  }
  return rep;
}

MonotonicityReport check_ratio_monotone_crescents(double t, double h_outer, double shrink,
                                                  double tolerance) {
  if (!(h_outer > 0.0 && h_outer < 2.0 && shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("crescent parameters out of range");
  }
  MonotonicityReport rep;
  rep.mode = RatioMode::Crescents;
  rep.t = t;
  rep.tolerance = tolerance;
  double h_inner = shrink * h_outer;
  rep.params = {h_inner, h_outer};
  double lam_out = h_outer / (2.0 - h_outer);
  double lam_in = h_inner / (2.0 - h_inner);
  double depths[2] = {std::log(lam_out / lam_in), 0.0};
  for (double d : depths) {
    double it = occupation_integral_depth(d, t, 1e-10);
    double ii = occupation_integral_depth(d, kInf, 1e-10);
    rep.ratios.push_back(it / ii);
  }
  double m = rep.ratios[1] - rep.ratios[0];
  rep.margins.push_back(m);
  rep.monotone = m > tolerance;
  return rep;
}

}  // namespace hgarden
