#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hgarden/garden.hpp"
#include "hgarden/kernels.hpp"
#include "hgarden/quadrature.hpp"

namespace hgarden {

namespace {

const Garden& require_disk(const Garden& G, const char* op) {
  if (G.kind() != Garden::Kind::Explicit || (G.model() != Model::Disk && !G.is_empty())) {
    throw ModelMismatch(std::string(op) + " expects a disk garden (see Garden::truncated_disk)");
  }
  return G;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

// Measure of a union of closed intervals.
double union_length(std::vector<std::pair<double, double>>& iv) {
  std::sort(iv.begin(), iv.end());
  double total = 0.0, lo = 0.0, hi = 0.0;
  bool open = false;
  for (const auto& [a, b] : iv) {
    if (!open || a > hi) {
      if (open) total += hi - lo;
      lo = a;
      hi = b;
      open = true;
    } else {
      hi = std::max(hi, b);
    }
  }
  if (open) total += hi - lo;
  return total;
}

// Arc of the circle of radius 1 - e^{-u} inside a disk ball of diameter h.
double arc_u(double u, double h) {
  double one_minus_r = std::exp(-u);
  double r = 1.0 - one_minus_r;
  if (h > 1.0 && r <= h - 1.0) return 2.0 * kPi;
  double gap = h - one_minus_r;
  if (gap <= 0.0) return 0.0;
  double arg = one_minus_r * gap / (4.0 * r * (1.0 - 0.5 * h));
  return 4.0 * std::asin(std::sqrt(std::min(1.0, arg)));
}

}  // namespace

double circle_slice_measure(const Garden& G, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("circle_slice_measure: r must lie in (0,1)");
  require_disk(G, "circle_slice_measure");
  std::vector<std::pair<double, double>> iv;
  for (const Horoball& b : G.balls()) {
    double arc = horoball_arc(r, b.size);
    if (arc <= 0.0) continue;
    if (arc >= 2.0 * kPi) return 2.0 * kPi;
    double phi = wrap_angle(std::arg(b.base));
    double lo = phi - 0.5 * arc, hi = phi + 0.5 * arc;
    if (lo < 0.0) {
      iv.emplace_back(lo + 2.0 * kPi, 2.0 * kPi);
      lo = 0.0;
    }
    if (hi > 2.0 * kPi) {
      iv.emplace_back(0.0, hi - 2.0 * kPi);
      hi = 2.0 * kPi;
    }
    iv.emplace_back(lo, hi);
  }
  return std::min(2.0 * kPi, union_length(iv));
}

double cesaro_average(const Garden& G, double r, double rel_tol) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("cesaro_average: r must lie in (0,1)");
  require_disk(G, "cesaro_average");
  // u = -log(1 - s) turns ds/(1-s) into du. Garden balls are disjoint, so slices add.
  double U = -std::log1p(-r);
  double total = 0.0;
  for (const Horoball& b : G.balls()) {
    double h = b.size;
    double u0 = h >= 1.0 ? 0.0 : -std::log(h);
    if (u0 >= U) continue;
    auto f = [h](double u) { return arc_u(u, h); };
    std::vector<double> br{u0};
    if (h > 1.0) {
      double u_full = -std::log(2.0 - h);  // r = h - 1
      if (u_full > u0 && u_full < U) br.push_back(u_full);
    }
    for (double step : {0.5, 2.0, 8.0, 32.0}) {
      double u = u0 + step;
      if (u > br.back() && u < U) br.push_back(u);
    }
    br.push_back(U);
    // square-root onset at u0 when the circle first touches the ball
    double w = br[1] - br[0];
    auto g = [&](double v) { return 2.0 * v * f(u0 + v * v); };
    total += integrate(g, 0.0, std::sqrt(w), rel_tol, 1e-300);
    for (std::size_t i = 1; i + 1 < br.size(); ++i) total += integrate(f, br[i], br[i + 1], rel_tol, 1e-300);
  }
  return total / U;
}

double radial_wiggliness(const Garden& G, double theta, double r_max) {
  if (!(r_max > 0.0 && r_max < 1.0)) throw std::invalid_argument("radial_wiggliness: r_max must lie in (0,1)");
  require_disk(G, "radial_wiggliness");
  std::vector<std::pair<double, double>> iv;
  for (const Horoball& b : G.balls()) {
    double h = b.size;
    // |t e^{i theta} - c|^2 < h^2/4 with c = (1 - h/2) zeta:  t^2 - 2 p t + (1 - h) < 0
    double p = (1.0 - 0.5 * h) * std::cos(theta - std::arg(b.base));
    double disc = p * p - (1.0 - h);
    if (disc <= 0.0) continue;
    double sq = std::sqrt(disc);
    double t_hi = p + sq;
    double t_lo = (1.0 - h) / t_hi;  // product of roots, avoids cancellation
    if (t_hi <= 0.0) continue;
    t_lo = std::max(t_lo, 0.0);
    t_hi = std::min(t_hi, r_max);
    if (t_hi <= t_lo) continue;
    iv.emplace_back(2.0 * std::atanh(t_lo), 2.0 * std::atanh(t_hi));
  }
  return union_length(iv) / (2.0 * std::atanh(r_max));
}

}  // namespace hgarden
