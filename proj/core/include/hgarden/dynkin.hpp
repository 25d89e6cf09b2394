#pragma once

#include <vector>

#include "hgarden/garden.hpp"

namespace hgarden {

// mu has |mu| = k on its support, the reflection of the garden in the unit circle.
struct DynkinInput {
  double k = 0.5;
  const Garden* support = nullptr;  // disk garden; null means empty support
  Point z;
  double L = 0.0;  // used by the corollary form only
};

enum class DynkinVariant { Classic, Improved, Corollary };

struct DynkinResult {
  DynkinVariant variant = DynkinVariant::Corollary;
  double value = 0.0;     // right-hand side with the multiplicative constant set to 1
  double constant = 1.0;  // C_k, C'_k or the corollary constant, not estimated
  double tail = 0.0;      // int_{1-|z|}^1 omega(z,t) / t^{2-k} dt
  double scale = 0.0;     // (1-|z|)^{1-k}
};

//   classic:   omega(z,t) = k (|supp mu cap B(z,t)| / |B(z,t)|)^{1/2}
//   improved:  omega(z,t) = k (|supp mu cap B(z,t)| / |B(z,t)|)^{1/(1+k)}
//   value = (1-|z|)^{1-k} (1 + tail); corollary: k L e^{-(1-k)L} + (1-|z|)^{1-k}.
DynkinResult dynkin_bound(const DynkinInput& in, DynkinVariant variant);

// Euclidean area of supp mu inside B(w, t).
double reflected_support_area(const Garden& G, cplx w, double t);

// Reflected disk {1/conj(z) : z in B} of a disk horoball with h < 1: center and radius.
struct Circle {
  cplx center;
  double radius = 0.0;
};
Circle reflect_horoball(const Horoball& B);

// Area of the intersection of two disks of radii a, b with centers at distance d.
double lens_area(double d, double a, double b);

// Shell terms k e^{-j(1-k)} e^{(j-L)/(1+k)}, j = 0..floor(L), of the corollary estimate.
std::vector<double> dynkin_shell_terms(double k, double L);

}  // namespace hgarden
