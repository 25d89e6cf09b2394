#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgarden {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}
  double achieved() const { return achieved_; }
  double requested() const { return requested_; }

 private:
  double achieved_;
  double requested_;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity. Throws QuadratureError when the
// error estimate exceeds max(rel_tol * L1, abs_tol).
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0);

// Tanh-sinh, for integrands with algebraic endpoint singularities on a finite interval.
double integrate_endpoint_singular(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                                   double abs_tol = 0.0);

// Sum of integrate() over consecutive breakpoints.
double integrate_pieces(const Integrand& f, const std::vector<double>& breaks,
                        double rel_tol = 1e-10, double abs_tol = 0.0);

}  // namespace hgarden
