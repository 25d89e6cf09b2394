#pragma once

#include <string>
#include <vector>

#include "hgarden/geometry.hpp"

// Heat kernel and Green's functions of hyperbolic Brownian motion with generator
// (1/2) Delta_hyp. All radial functions take the hyperbolic distance rho to the pole.
// A time argument equal to kInf selects the closed-form t = infinity case.

namespace hgarden {

// (1/pi) log coth(rho/2), i.e. (1/pi) log(1/|x|) in the disk with pole 0.
double green_inf_rho(double rho);
double green_inf(const Point& x);
double green_inf(const Point& x, const Point& y);

double heat_kernel(double t, double rho, double rel_tol = 1e-10);
// Heat mass inside the hyperbolic disk of radius rho_max.
double heat_kernel_mass(double t, double rho_max, double rel_tol = 1e-10);

double green_partial_rho(double t, double rho, double rel_tol = 1e-10);
double green_partial(double t, const Point& x);
double green_partial(double t, const Point& x, const Point& y);

// Angular measure of the circle |z| = r lying inside a disk horoball of diameter h.
double horoball_arc(double r, double h);

// Expected occupation of a horoball up to time t for a path started at signed
// horoball distance `depth` (negative inside). Every (B, x0) pair reduces to this
// by moving x0 to 0 with a disk automorphism.
double occupation_integral_depth(double depth, double t, double rel_tol = 1e-9);
double occupation_integral(const Horoball& B, const Point& x0, double t, double rel_tol = 1e-9);

// Integral of g_t over the annulus r_inner < |z| < r_outer, pole at 0.
double annulus_occupation(double r_inner, double r_outer, double t, double rel_tol = 1e-10);

struct KernelGrid {
  std::vector<double> times;
  std::vector<double> radii;
  std::vector<std::vector<double>> values;  // values[i][j] = p_{times[i]}(radii[j])
  std::vector<double> total_mass;           // integral of p_t over the plane, per time
  double tolerance = 1e-8;

  double at(std::size_t i, std::size_t j) const { return values[i][j]; }
};

KernelGrid build_kernel_grid(const std::vector<double>& times, const std::vector<double>& radii,
                             double tolerance = 1e-8);

enum class RatioMode { Annuli, Crescents };

struct MonotonicityReport {
  RatioMode mode = RatioMode::Annuli;
  double t = 0.0;
  std::vector<double> params;  // radii (annuli) or horoball diameters (crescents)
  std::vector<double> ratios;
  std::vector<double> margins;  // annuli: 1 - ratio[i]/ratio[i-1]; crescents: ratio(B2) - ratio(B1)
  double tolerance = 1e-6;
  bool monotone = false;
};

// Annuli: g_t(r)/g_inf(r) on a radial grid of disk radii, asserted strictly decreasing.
MonotonicityReport check_ratio_monotone_annuli(double t, const std::vector<double>& r_grid,
                                               double tolerance = 1e-6);
// Crescents: B1 inside B2, common base, z0 on the boundary of B2; B1 has diameter
// shrink * h_outer. Ratios I_t/I_inf asserted ordered ratio(B1) < ratio(B2).
MonotonicityReport check_ratio_monotone_crescents(double t, double h_outer = 1.0,
                                                  double shrink = 0.5,
                                                  double tolerance = 1e-6);

}  // namespace hgarden
