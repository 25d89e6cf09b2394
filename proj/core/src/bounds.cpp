#include "hgarden/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hgarden/quadrature.hpp"

namespace hgarden {

namespace {

void check_k(double k) {
  if (!(k >= 0.0 && k < 0.49)) throw std::invalid_argument("V2 bound needs 0 <= k < 0.49");
}

// Angular measure of {|z| = 1 - omr} inside a disk horoball of diameter h.
double arc_omr(double omr, double h) {
  if (h > 1.0 && omr >= 2.0 - h) return 2.0 * kPi;
  double gap = h - omr;
  if (gap <= 0.0) return 0.0;
  double r = 1.0 - omr;
  double arg = omr * gap / (4.0 * r * (1.0 - 0.5 * h));
  return 4.0 * std::asin(std::sqrt(std::min(1.0, arg)));
}

double inflate_diameter(double h, double s) {
  double lam = h / (2.0 - h) * std::exp(s);
  return 2.0 * lam / (1.0 + lam);
}

// int_{B_s} ((h_ref)/(1-|z|))^alpha g_inf dA_hyp for the disk horoball of diameter hs, x0 = 0.
double envelope_mass(double hs, double h_ref, double alpha) {
  auto f = [&](double omr) {
    if (omr <= 0.0 || omr >= 1.0) return 0.0;
    double r = 1.0 - omr;
    double g_over = -std::log1p(-omr) / (kPi * omr);
    double env = alpha == 0.0 ? 1.0 : std::pow(h_ref / omr, alpha);
    return 4.0 * r / ((1.0 + r) * (1.0 + r)) * g_over / omr * env * arc_omr(omr, hs);
  };
  // square-root edge at omr = e (circle tangency or full-circle knee): omr = e - u^2
  auto edge = [&](double e) {
    auto g = [&](double u) { return 2.0 * u * f(e - u * u); };
    return integrate(g, 0.0, std::sqrt(0.5 * e), 1e-10, 1e-300);
  };
  // omr^{-1/2-alpha} at the boundary point: omr = c e^{-x}
  auto inner = [&](double c) {
    auto g = [&](double x) {
      double o = c * std::exp(-x);
      return o * f(o);
    };
    return integrate(g, 0.0, kInf, 1e-10, 1e-300);
  };
  if (hs <= 1.0) return inner(0.5 * hs) + edge(hs);
  double knee = 2.0 - hs;
  return inner(0.5 * knee) + edge(knee) + integrate(f, knee, 1.0, 1e-10, 1e-300);
}

}  // namespace

double v2_gamma(double k, const V2Params& prm) { return 2.0 - 2.0 * k - prm.eps; }

double v2_profile(double S, double k, double p_abs, double R, const V2Params& prm) {
  check_k(k);
  double K = prm.C * k * k * p_abs * p_abs;
  double s = std::min(std::max(S, 0.0), 0.5 * R);
  return K * std::exp(-v2_gamma(k, prm) * s) + prm.delta;
}

double v2_bound(const Point& z, double k, cplx p, double R, const Garden& G, const V2Params& prm) {
  check_k(k);
  double pa = std::abs(p);
  if (z.model == Model::Disk && std::abs(z.coord) < prm.r_delta) return 18.0 * k * k * pa * pa + prm.delta;
  double S = G.is_empty() ? kInf : G.signed_distance(z, std::max(R, 1.0));
  return v2_profile(S, k, pa, R, prm);
}

FreezingReport freezing_check(double k, cplx p, const Horoball& B0, double R, const V2Params& prm) {
  if (!(R > 0.0)) throw std::invalid_argument("freezing_check needs R > 0");
  if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("freezing_check needs k in [0,1)");
  Horoball B = convert(B0, Model::Disk);
  FreezingReport rep;
  rep.k = k;
  rep.p_abs = std::abs(p);
  rep.R = R;
  rep.h = B.size;
  rep.params = prm;
  double alpha = 6.0 * k * rep.p_abs;
  rep.part1_hypotheses = alpha < 0.49;
  rep.part2_hypotheses = rep.part1_hypotheses && k < 0.49 && k * rep.p_abs < prm.c / R;
  if (!rep.part1_hypotheses) {
    rep.note = "outside the freezing hypotheses: 6k|p| >= 0.49";
    return rep;
  }
  if (!rep.part2_hypotheses) rep.note = "outside the part 2 hypotheses: need k < 0.49 and k|p| < c/R";
  double half = 0.5 * R;
  rep.h_star = inflate_diameter(B.size, half);
  double hs = rep.h_star;
  auto M = [&](double s) { return envelope_mass(inflate_diameter(B.size, s), hs, alpha); };

  rep.envelope_integral = M(half);
  rep.frozen_integral = envelope_mass(hs, hs, 0.0);
  rep.ratio_to_frozen = rep.envelope_integral / rep.frozen_integral;
  rep.ratio_to_diam = rep.envelope_integral / hs;

  // V2 / (C k^2 |p|^2) = e^{-gamma min(S, R/2)}; layer-cake over the inflations B_s
  double gam = v2_gamma(k, prm);
  rep.weight_ratio = std::exp(-gam);
  auto f = [&](double s) { return std::exp(-gam * s); };
  int n = static_cast<int>(std::ceil(half - 1e-12));
  double prev_s = 0.0, prev_fM = M(0.0);
  rep.shell_contributions.push_back(prev_fM);
  for (int m = 1; m <= n; ++m) {
    double s = std::min(static_cast<double>(m), half);
    double fM = f(s) * M(s);
    double inner = integrate([&](double u) { return f(u) * M(u); }, prev_s, s, 1e-9);
    rep.shell_contributions.push_back(fM - prev_fM + gam * inner);
    prev_s = s;
    prev_fM = fM;
  }
  for (std::size_t m = 1; m < rep.shell_contributions.size(); ++m) {
    rep.shell_ratios.push_back(rep.shell_contributions[m] / rep.shell_contributions[m - 1]);
  }
  double unit = std::accumulate(rep.shell_contributions.begin(), rep.shell_contributions.end(), 0.0);
  double K = prm.C * k * k * rep.p_abs * rep.p_abs;
  rep.v2_integral = K * unit;
  double e = std::exp(-half);
  rep.ratio2 = unit / (e * hs);
  rep.normalized_quotient = unit / (e * rep.envelope_integral);
  rep.quotient = rep.v2_integral / rep.envelope_integral;
  return rep;
}

namespace {

// Hyperbolic-measure (dx dy / y) area of the horoball of diameter sigma at 0 above height tau.
double cut_area(double sigma, double tau) {
  if (tau >= sigma) return 0.0;
  if (tau <= 0.0) return kPi * sigma;
  double th = std::asin(std::sqrt(tau / sigma));
  return 2.0 * sigma * (0.5 * kPi - th - std::sin(th) * std::cos(th));
}

// int over the unit-diameter B* above tau of (V2 - c2) dx dy / y, per unit C k^2 |p|^2.
double unit_excess(double tau, double a, double gam) {
  if (tau >= 1.0) return 0.0;
  double lo = std::max(a, tau);
  auto g = [&](double sig) { return std::pow(sig, -gam - 1.0) * cut_area(sig, tau); };
  std::vector<double> br{lo};
  // resolve the sigma^{-gamma-1} decay geometrically
  for (double s = lo * 4.0; s < 1.0; s *= 4.0) br.push_back(s);
  br.push_back(1.0);
  return gam * std::pow(a, gam) * integrate_pieces(g, br, 1e-10, 1e-300);
}

std::vector<int> totients(int n) {
  std::vector<int> phi(static_cast<std::size_t>(n) + 1);
  std::iota(phi.begin(), phi.end(), 0);
  for (int i = 2; i <= n; ++i) {
    if (phi[static_cast<std::size_t>(i)] != i) continue;
    for (int j = i; j <= n; j += i) phi[static_cast<std::size_t>(j)] -= phi[static_cast<std::size_t>(j)] / i;
  }
  return phi;
}

}  // namespace

BpReport bp_quotient(const Garden& G, double k, cplx p, double t, const V2Params& prm) {
  if (!(t > 0.0) || t >= 2.0) throw std::invalid_argument("bp_quotient: A(t) = [0,1] x [t,2] is empty for t >= 2");
  if (G.model() != Model::HalfPlane) throw ModelMismatch("bp_quotient needs a half-plane garden");
  bool modular = G.kind() == Garden::Kind::ModularFord;
  if (!modular && !G.is_empty() && !G.periodic()) throw std::invalid_argument("bp_quotient needs a 1-periodic garden");
  check_k(k);
  double pa = std::abs(p);
  double R = G.separation();
  BpReport rep;
  rep.hypotheses = 6.0 * k * pa < std::min(0.49, std::isfinite(R) ? prm.c / R : kInf);
  if (!rep.hypotheses) rep.note = "outside the bound hypotheses: need 6k|p| < min(0.49, c/R)";
  double gam = v2_gamma(k, prm);
  double K = prm.C * k * k * pa * pa;
  double a = std::isfinite(R) ? std::exp(-0.5 * R) : 0.0;
  double c2 = K * std::pow(a, gam);
  rep.denominator = std::log(2.0 / t);
  rep.floor_value = c2 + prm.delta;
  double excess = 0.0;
  if (modular) {
    // B*_inf = {y > 1}; finite balls p/q with diam(B*) = 1/q^2, phi(q) of them per period
    double lo = std::max(t, 1.0);
    excess += std::pow(a, gam) * ((std::pow(2.0, gam) - std::pow(lo, gam)) / gam - std::log(2.0 / lo));
    rep.balls_used = 1;
    int qmax = static_cast<int>(std::floor(1.0 / std::sqrt(t)));
    auto phi = totients(qmax);
    for (int q = 1; q <= qmax; ++q) {
      double hq = 1.0 / (static_cast<double>(q) * q);
      excess += phi[static_cast<std::size_t>(q)] * hq * unit_excess(t / hq, a, gam);
      rep.balls_used += static_cast<std::size_t>(phi[static_cast<std::size_t>(q)]);
    }
  } else {
    for (const Horoball& b : G.balls()) {
      if (b.at_infinity) {
        double lo = std::max(t, b.size * a);
        if (lo >= 2.0) continue;
        auto g = [&](double y) {
          double S = std::max(0.0, std::log(b.size / y));
          return (std::exp(-gam * std::min(S, 0.5 * R)) - std::pow(a, gam)) / y;
        };
        std::vector<double> br{lo};
        if (b.size > lo && b.size < 2.0) br.push_back(b.size);
        br.push_back(2.0);
        excess += integrate_pieces(g, br, 1e-10, 1e-300);
        ++rep.balls_used;
        continue;
      }
      double hstar = b.size / a;
      if (hstar > 2.0) throw std::invalid_argument("bp_quotient: inflated ball leaves the strip y < 2");
      excess += hstar * unit_excess(t / hstar, a, gam);
      ++rep.balls_used;
    }
  }
  rep.numerator = (c2 + prm.delta) * rep.denominator + K * excess;
  rep.quotient = rep.numerator / rep.denominator;
  return rep;
}

}  // namespace hgarden
