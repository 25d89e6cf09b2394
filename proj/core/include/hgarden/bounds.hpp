#pragma once

#include <string>
#include <vector>

#include "hgarden/garden.hpp"

namespace hgarden {

struct V2Params {
  double C = 1.0;
  double eps = 0.01;      // exponent loss in 2 - 2k - eps
  double c = 0.1;         // k|p| < c/R
  double delta = 0.0;
  double r_delta = 0.5;   // disk only
};

// Decay exponent 2 - 2k - eps.
double v2_gamma(double k, const V2Params& prm);

// Piecewise potential bound in the hyperbolic distance S >= 0 to the garden; no compact case.
double v2_profile(double S, double k, double p_abs, double R, const V2Params& prm);

// Three-case bound: |z| < r_delta (disk) gives 18 k^2 |p|^2 + delta; otherwise the
// profile at S = d(z, G). Requires k < 0.49.
double v2_bound(const Point& z, double k, cplx p, double R, const Garden& G, const V2Params& prm = {});

struct FreezingReport {
  double k = 0.0, p_abs = 0.0, R = 0.0, h = 0.0, h_star = 0.0;
  V2Params params;
  bool part1_hypotheses = true;  // 6k|p| < 0.49
  bool part2_hypotheses = true;  // additionally k < 0.49, k|p| < c/R
  std::string note;

  double envelope_integral = 0.0;  // int_{B*} E g_inf dA_hyp
  double frozen_integral = 0.0;    // int_{B*} g_inf dA_hyp, E frozen at the top of B*
  double ratio_to_frozen = 0.0;
  double ratio_to_diam = 0.0;      // envelope_integral / (diam B* E(z_{B*}))

  double v2_integral = 0.0;        // int_{B*} V2 E g_inf dA_hyp, delta = 0
  double ratio2 = 0.0;             // v2_integral / (C k^2 |p|^2 e^{-R/2} diam B* E(z_{B*}))
  double quotient = 0.0;           // v2_integral / envelope_integral
  double normalized_quotient = 0.0;  // quotient / (C k^2 |p|^2 e^{-R/2})

  double weight_ratio = 0.0;       // V2 drop per unit shell, e^{-(2-2k-eps)}
  std::vector<double> shell_contributions;  // S^0 = B, then S^m = B^m \ B^{m-1}
  std::vector<double> shell_ratios;
};

// Disk setting with x0 = 0 and E(z) = ((1-|z_{B*}|)/(1-|z|))^{6k|p|}, B* = inflate(B, R/2).
FreezingReport freezing_check(double k, cplx p, const Horoball& B, double R, const V2Params& prm = {});

struct BpReport {
  double quotient = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;  // log(2/t)
  double floor_value = 0.0;  // second-case constant plus delta
  std::size_t balls_used = 0;
  bool hypotheses = true;    // 6k|p| < min(0.49, c/R)
  std::string note;
};

// Bound-side Becker-Pommerenke quotient over A(t) = [0,1] x [t,2] for a 1-periodic
// half-plane garden (explicit periodic or modular Ford), with |2n_f/rho|^2 replaced by V2
// and |f'^p| frozen.
BpReport bp_quotient(const Garden& G, double k, cplx p, double t, const V2Params& prm = {});

}  // namespace hgarden
