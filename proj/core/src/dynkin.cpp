#include "hgarden/dynkin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hgarden/quadrature.hpp"

namespace hgarden {

Circle reflect_horoball(const Horoball& B0) {
  Horoball B = convert(B0, Model::Disk);
  double h = B.size;
  if (!(h < 1.0)) throw std::invalid_argument("reflection of a horoball with h >= 1 is unbounded");
  return {B.base * ((2.0 - h) / (2.0 * (1.0 - h))), h / (2.0 * (1.0 - h))};
}

namespace {

// x - sin x without cancellation
double x_minus_sin(double x) {
  if (x > 0.1) return x - std::sin(x);
  double x2 = x * x;
  return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
}

// Circular segment of radius r cut by a chord subtending 2 alpha.
double segment(double r, double alpha) { return 0.5 * r * r * x_minus_sin(2.0 * alpha); }

}  // namespace

double lens_area(double d, double a, double b) {
  if (a <= 0.0 || b <= 0.0 || d >= a + b) return 0.0;
  if (d <= std::abs(a - b)) {
    double m = std::min(a, b);
    return kPi * m * m;
  }
  double prod = (-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b);
  double h = std::sqrt(std::max(0.0, prod)) / (2.0 * d);  // half chord
  double xa = ((d - b) * (d + b) + a * a) / (2.0 * d);
  double xb = ((d - a) * (d + a) + b * b) / (2.0 * d);
  return segment(a, std::atan2(h, xa)) + segment(b, std::atan2(h, xb));
}

double reflected_support_area(const Garden& G, cplx w, double t) {
  if (G.is_empty()) return 0.0;
  if (G.model() != Model::Disk || G.kind() != Garden::Kind::Explicit) {
    throw ModelMismatch("support area needs an explicit disk garden");
  }
  double s = 0.0;
  for (const Horoball& b : G.balls()) {
    Circle c = reflect_horoball(b);
    s += lens_area(std::abs(w - c.center), t, c.radius);
  }
  return s;
}

DynkinResult dynkin_bound(const DynkinInput& in, DynkinVariant variant) {
  double k = in.k;
  if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("Dyn'kin bound needs k in (0,1)");
  if (!(in.L >= 0.0)) throw std::invalid_argument("Dyn'kin bound needs L >= 0");
  cplx z = convert(in.z, Model::Disk).coord;
  double d = 1.0 - std::abs(z);
  DynkinResult res;
  res.variant = variant;
  res.scale = std::pow(d, 1.0 - k);
  if (variant == DynkinVariant::Corollary) {
    res.value = k * in.L * std::exp(-(1.0 - k) * in.L) + res.scale;
    return res;
  }
  double ex = variant == DynkinVariant::Classic ? 0.5 : 1.0 / (1.0 + k);
  const Garden* G = in.support;
  if (G == nullptr || G->is_empty()) {
    res.value = res.scale;
    return res;
  }
  if (G->model() != Model::Disk || G->kind() != Garden::Kind::Explicit) {
    throw ModelMismatch("Dyn'kin bound needs an explicit disk garden");
  }
  std::vector<Circle> cs;
  std::vector<double> br{std::log(d), 0.0};
  for (const Horoball& b : G->balls()) {
    Circle c = reflect_horoball(b);
    double D = std::abs(z - c.center);
    if (D - c.radius >= 1.0) continue;
    cs.push_back(c);
    for (double t : {D - c.radius, D + c.radius, std::abs(D - c.radius)}) {
      if (t > d && t < 1.0) br.push_back(std::log(t));
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  auto f = [&](double s) {
    double t = std::exp(s);
    double area = 0.0;
    for (const Circle& c : cs) area += lens_area(std::abs(z - c.center), t, c.radius);
    if (area <= 0.0) return 0.0;
    double frac = std::min(1.0, area / (kPi * t * t));
    return k * std::pow(frac, ex) * std::exp((k - 1.0) * s);
  };
  // lens areas start like (t - t0)^{3/2}: tanh-sinh per piece
  double tail = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    if (f(0.5 * (br[i] + br[i + 1])) == 0.0 && f(br[i + 1] - 1e-12 * (br[i + 1] - br[i])) == 0.0) continue;
    tail += integrate_endpoint_singular(f, br[i], br[i + 1], 1e-8, 1e-300);
  }
  res.tail = tail;
  res.value = res.scale * (1.0 + res.tail);
  return res;
}

std::vector<double> dynkin_shell_terms(double k, double L) {
  if (!(k > 0.0 && k < 1.0) || !(L >= 0.0)) throw std::invalid_argument("shell terms need k in (0,1), L >= 0");
  std::vector<double> a;
  int n = static_cast<int>(std::floor(L));
  for (int j = 0; j <= n; ++j) a.push_back(k * std::exp(-j * (1.0 - k) + (j - L) / (1.0 + k)));
  return a;
}

}  // namespace hgarden
