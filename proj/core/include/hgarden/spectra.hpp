#pragma once

#include <functional>
#include <vector>

#include "hgarden/bm.hpp"
#include "hgarden/stats.hpp"
#include "hgarden/test_maps.hpp"

namespace hgarden {

// (1/2pi) int |f'(r e^{i theta})^p| d theta. Panels halve toward each singular direction,
// depth capped at 60.
double integral_means(const TestMap& f, cplx p, double r, double rel_tol = 1e-10);
double log_integral_means(const TestMap& f, cplx p, double r, double rel_tol = 1e-10);

// Slope of log integral_means against log 1/(1-r). r_grid must cover at least four
// dyadic scales of 1-r. warning is set when the residual spread is large.
SpectrumFit fit_beta(const TestMap& f, cplx p, const std::vector<double>& r_grid);

// Geometric grid 1 - r = 2^{-j}, j = j_lo..j_hi.
std::vector<double> dyadic_r_grid(int j_lo, int j_hi);

// log E_0 |f'(B_t)^p| on t_grid from N disk paths started at 0, slope fitted over the
// upper half of the grid. warning: top 1% of samples carry more than half of the mean
// at some grid time.
SpectrumFit brownian_spectrum(const TestMap& f, cplx p, const std::vector<double>& t_grid,
                              const McConfig& cfg);
std::vector<SpectrumFit> brownian_spectra(const TestMap& f, const std::vector<cplx>& p_list,
                                          const std::vector<double>& t_grid, const McConfig& cfg);

// Root p > 0 of beta(p) = p - 1. This is a spectral root; it equals the Minkowski
// dimension of f(S^1) only when f(S^1) is a quasicircle.
double mdim_quadratic(double c);  // beta(p) = c p^2
double mdim_from_beta(const std::function<double(double)>& beta, double p_lo = 0.0, double p_hi = 4.0,
                      double tol = 1e-9);
double mdim_from_samples(const std::vector<double>& p, const std::vector<double>& beta);

}  // namespace hgarden
