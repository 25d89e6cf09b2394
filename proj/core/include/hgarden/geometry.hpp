#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace hgarden {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Model { Disk, HalfPlane };

std::string to_string(Model m);

class ModelMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidMap : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Interior point of the hyperbolic plane. Curvature -1, disk metric 2|dz|/(1-|z|^2),
// half-plane metric |dz|/Im z, identified through the Cayley map T(z) = i(1-z)/(1+z).
struct Point {
  Model model = Model::Disk;
  cplx coord{0.0, 0.0};

  static Point disk(cplx z);
  static Point half_plane(cplx z);
};

double hyp_distance(const Point& p, const Point& q);

Point convert(const Point& p, Model target);

cplx cayley(cplx z);
cplx cayley_inverse(cplx w);

// Horoball tangent to the ideal boundary.
//   Disk: base is a unit complex number, size is the Euclidean diameter h in (0, 2).
//   Half-plane, finite base: base.real() is the tangency point, size is the diameter.
//   Half-plane, base at infinity: the set {Im z > size}.
struct Horoball {
  Model model = Model::Disk;
  cplx base{1.0, 0.0};
  bool at_infinity = false;
  double size = 0.5;

  static Horoball disk(cplx base, double h);
  static Horoball disk_angle(double theta, double h);
  static Horoball half_plane(double x, double diameter);
  static Horoball half_plane_infinity(double height);

  Point top() const;
  // Euclidean center, disk model only.
  cplx center() const;
  // log of the Busemann level: log(h/(2-h)) for disk, log(diameter) for a finite base,
  // -log(height) for the base at infinity. Inflation by s adds s.
  double level() const;
};

bool operator==(const Horoball& a, const Horoball& b);

double horoball_distance(const Horoball& B, const Point& z);
bool horoball_contains(const Horoball& B, const Point& z);
Horoball horoball_inflate(const Horoball& B, double s);
Horoball convert(const Horoball& B, Model target);

struct MobiusMap {
  cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
  Model model = Model::Disk;

  static MobiusMap identity(Model m);
  static MobiusMap disk_rotation(double theta);
  // Disk automorphism sending w to 0.
  static MobiusMap disk_to_origin(cplx w);
  // Real unimodular matrix acting on the half-plane.
  static MobiusMap half_plane(double a, double b, double c, double d);

  MobiusMap inverse() const;
  void validate() const;
};

MobiusMap compose(const MobiusMap& f, const MobiusMap& g);
Point mobius_apply(const MobiusMap& m, const Point& p);
Horoball mobius_apply(const MobiusMap& m, const Horoball& B);

}  // namespace hgarden
