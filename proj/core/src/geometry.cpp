#include "hgarden/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hgarden {

namespace {

void require_same(Model a, Model b, const char* what) {
  if (a != b) {
    throw ModelMismatch(std::string(what) + ": " + to_string(a) + " vs " + to_string(b));
  }
}

// 1 - |z|^2 without cancellation for |z| near 1.
double disk_defect(cplx z) {
  double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

}  // namespace

std::string to_string(Model m) { return m == Model::Disk ? "disk" : "halfplane"; }

Point Point::disk(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(std::abs(z) < 1.0)) {
    throw std::invalid_argument("disk point must satisfy |z| < 1");
  }
  return Point{Model::Disk, z};
}

Point Point::half_plane(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.imag() > 0.0)) {
    throw std::invalid_argument("half-plane point must satisfy Im z > 0");
  }
  return Point{Model::HalfPlane, z};
}

cplx cayley(cplx z) { return cplx(0.0, 1.0) * (1.0 - z) / (1.0 + z); }

cplx cayley_inverse(cplx w) {
  const cplx i(0.0, 1.0);
  return (i - w) / (i + w);
}

double hyp_distance(const Point& p, const Point& q) {
  require_same(p.model, q.model, "hyp_distance");
  double num = std::abs(p.coord - q.coord);
  if (num == 0.0) return 0.0;
  if (p.model == Model::HalfPlane) {
    return 2.0 * std::asinh(num / (2.0 * std::sqrt(p.coord.imag() * q.coord.imag())));
  }
  // Half-plane formula pulled back through the Cayley map; the |1+z| factors cancel.
  return 2.0 * std::asinh(num / std::sqrt(disk_defect(p.coord) * disk_defect(q.coord)));
}

Point convert(const Point& p, Model target) {
  if (p.model == target) return p;
  if (target == Model::HalfPlane) return Point::half_plane(cayley(p.coord));
  return Point::disk(cayley_inverse(p.coord));
}

Horoball Horoball::disk(cplx base, double h) {
  double m = std::abs(base);
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("horoball base must be nonzero");
  if (!(h > 0.0 && h < 2.0)) throw std::invalid_argument("disk horoball diameter must lie in (0, 2)");
  return Horoball{Model::Disk, base / m, false, h};
}

Horoball Horoball::disk_angle(double theta, double h) {
  return disk(std::polar(1.0, theta), h);
}

Horoball Horoball::half_plane(double x, double diameter) {
  if (!std::isfinite(x)) throw std::invalid_argument("horoball base must be finite");
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw std::invalid_argument("horoball diameter must be positive");
  }
  return Horoball{Model::HalfPlane, cplx(x, 0.0), false, diameter};
}

Horoball Horoball::half_plane_infinity(double height) {
  if (!(height > 0.0) || !std::isfinite(height)) {
    throw std::invalid_argument("horoball height must be positive");
  }
  return Horoball{Model::HalfPlane, cplx(0.0, 0.0), true, height};
}

Point Horoball::top() const {
  if (model == Model::Disk) return Point::disk((1.0 - size) * base);
  if (at_infinity) throw std::invalid_argument("horoball at infinity has no top point");
  return Point::half_plane(cplx(base.real(), size));
}

cplx Horoball::center() const {
  if (model != Model::Disk) throw ModelMismatch("center() is defined for disk horoballs");
  return (1.0 - 0.5 * size) * base;
}

double Horoball::level() const {
  if (model == Model::Disk) return std::log(size / (2.0 - size));
  return at_infinity ? -std::log(size) : std::log(size);
}

bool operator==(const Horoball& a, const Horoball& b) {
  if (a.model != b.model || a.at_infinity != b.at_infinity || a.size != b.size) return false;
  if (a.model == Model::HalfPlane) return a.at_infinity || a.base.real() == b.base.real();
  return a.base == b.base;
}

double horoball_distance(const Horoball& B, const Point& z) {
  require_same(B.model, z.model, "horoball_distance");
  const cplx w = z.coord;
  if (B.model == Model::HalfPlane) {
    if (B.at_infinity) return std::log(B.size / w.imag());
    return std::log(std::norm(w - B.base) / (B.size * w.imag()));
  }
  return std::log(std::norm(B.base - w)) - std::log(disk_defect(w)) - B.level();
}

bool horoball_contains(const Horoball& B, const Point& z) { return horoball_distance(B, z) < 0.0; }

Horoball horoball_inflate(const Horoball& B, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("inflation radius must be nonnegative");
  Horoball out = B;
  if (B.model == Model::HalfPlane) {
    out.size = B.at_infinity ? B.size * std::exp(-s) : B.size * std::exp(s);
    return out;
  }
  double lambda = std::exp(B.level() + s);
  out.size = 2.0 * lambda / (1.0 + lambda);
  if (!(out.size < 2.0)) throw std::domain_error("inflated horoball covers the disk in floating point");
  return out;
}

Horoball convert(const Horoball& B, Model target) {
  if (B.model == target) return B;
  if (target == Model::HalfPlane) {
    // Busemann levels shift by log(1 + x^2), the level at the common point 0 <-> i.
    double lambda = B.size / (2.0 - B.size);
    if (std::abs(B.base + 1.0) < 1e-14) {
      return Horoball::half_plane_infinity(1.0 / lambda);
    }
    double theta = std::arg(B.base);
    double x = std::tan(0.5 * theta);
    return Horoball::half_plane(x, lambda * (1.0 + x * x));
  }
  if (B.at_infinity) {
    double lambda = 1.0 / B.size;
    return Horoball::disk(cplx(-1.0, 0.0), 2.0 * lambda / (1.0 + lambda));
  }
  double x = B.base.real();
  double lambda = B.size / (1.0 + x * x);
  return Horoball::disk_angle(2.0 * std::atan(x), 2.0 * lambda / (1.0 + lambda));
}

MobiusMap MobiusMap::identity(Model m) { return MobiusMap{1.0, 0.0, 0.0, 1.0, m}; }

MobiusMap MobiusMap::disk_rotation(double theta) {
  cplx u = std::polar(1.0, 0.5 * theta);
  return MobiusMap{u, 0.0, 0.0, std::conj(u), Model::Disk};
}

MobiusMap MobiusMap::disk_to_origin(cplx w) {
  if (!(std::abs(w) < 1.0)) throw std::invalid_argument("disk_to_origin needs |w| < 1");
  double s = 1.0 / std::sqrt(disk_defect(w));
  return MobiusMap{s, -w * s, -std::conj(w) * s, s, Model::Disk};
}

MobiusMap MobiusMap::half_plane(double a, double b, double c, double d) {
  MobiusMap m{a, b, c, d, Model::HalfPlane};
  m.validate();
  return m;
}

MobiusMap MobiusMap::inverse() const { return MobiusMap{d, -b, -c, a, model}; }

void MobiusMap::validate() const {
  double scale = std::max(1.0, std::abs(a * d) + std::abs(b * c));
  if (std::abs(a * d - b * c - 1.0) > 1e-12 * scale) {
    throw InvalidMap("Mobius determinant must equal 1");
  }
  double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (model == Model::HalfPlane) {
    if (std::abs(a.imag()) > tol || std::abs(b.imag()) > tol || std::abs(c.imag()) > tol ||
        std::abs(d.imag()) > tol) {
      throw InvalidMap("half-plane automorphisms have real coefficients");
    }
  } else if (std::abs(d - std::conj(a)) > tol || std::abs(c - std::conj(b)) > tol) {
    throw InvalidMap("disk automorphisms have the form [[a, b], [conj b, conj a]]");
  }
}

MobiusMap compose(const MobiusMap& f, const MobiusMap& g) {
  require_same(f.model, g.model, "compose");
  return MobiusMap{f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d, f.c * g.a + f.d * g.c,
                   f.c * g.b + f.d * g.d, f.model};
}

Point mobius_apply(const MobiusMap& m, const Point& p) {
  require_same(m.model, p.model, "mobius_apply");
  m.validate();
  cplx w = (m.a * p.coord + m.b) / (m.c * p.coord + m.d);
  return m.model == Model::Disk ? Point::disk(w) : Point::half_plane(w);
}

Horoball mobius_apply(const MobiusMap& m, const Horoball& B) {
  require_same(m.model, B.model, "mobius_apply");
  m.validate();
  // Image base from the boundary action, image size from the image of one horocycle point.
  Point on_boundary = B.model == Model::HalfPlane && B.at_infinity
                          ? Point::half_plane(cplx(0.0, B.size))
                          : B.top();
  cplx w = mobius_apply(m, on_boundary).coord;
  if (m.model == Model::Disk) {
    cplx zeta = (m.a * B.base + m.b) / (m.c * B.base + m.d);
    zeta /= std::abs(zeta);
    double level = std::log(std::norm(zeta - w)) - std::log(disk_defect(w));
    double lambda = std::exp(level);
    return Horoball::disk(zeta, 2.0 * lambda / (1.0 + lambda));
  }
  double ar = m.a.real(), br = m.b.real(), cr = m.c.real(), dr = m.d.real();
  if (B.at_infinity) {
    if (cr == 0.0) return Horoball::half_plane_infinity(w.imag());
    double x = ar / cr;
    return Horoball::half_plane(x, std::norm(w - x) / w.imag());
  }
  double x0 = B.base.real();
  double den = cr * x0 + dr;
  if (den == 0.0) return Horoball::half_plane_infinity(w.imag());
  double x = (ar * x0 + br) / den;
  return Horoball::half_plane(x, std::norm(w - x) / w.imag());
}

}  // namespace hgarden
