#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hgarden/geometry.hpp"

namespace hgarden {

struct PairDistance {
  double distance = 0.0;
  bool degenerate = false;  // identical horoballs
};

PairDistance horoball_pair_distance(const Horoball& a, const Horoball& b);

// Reduce a half-plane point into the standard fundamental domain of PSL(2,Z),
// {|Re z| <= 1/2, |z| >= 1}.
cplx reduce_modular(cplx z);

// A family of horoballs pairwise more than `separation` apart.
//
// Explicit gardens carry their ball list (one period when periodic under z -> z+1).
// The modular Ford garden is the full PSL(2,Z) orbit of {Im z > 1/eps}, eps = e^{-R/2}:
// balls at every rational p/q with diameter eps/q^2 plus the ball at infinity. It is
// stored implicitly and queried through reduction to the fundamental domain.
class Garden {
 public:
  enum class Kind { Explicit, ModularFord };

  Garden();
  static Garden empty(Model m = Model::HalfPlane);
  static Garden from_balls(Model m, std::vector<Horoball> balls, double separation,
                           bool periodic = false);
  static Garden modular_ford(double R);

  Kind kind() const { return kind_; }
  Model model() const { return model_; }
  double separation() const { return separation_; }
  bool periodic() const { return periodic_; }
  bool is_empty() const { return kind_ == Kind::Explicit && balls_.empty(); }
  // Invariant under PSL(2,Z): queries may use any lift of a point.
  bool modular_invariant() const { return kind_ == Kind::ModularFord || is_empty(); }
  const std::vector<Horoball>& balls() const { return balls_; }
  double epsilon() const { return eps_; }

  const std::string& label() const { return label_; }
  void set_label(std::string s) { label_ = std::move(s); }

  bool contains(const Point& z) const;
  // Signed hyperbolic distance to the garden: negative depth inside a ball, distance to
  // the nearest ball outside, clamped to [-cap, cap]. For the modular garden the positive
  // branch is a lower bound that is exact near the ball at infinity of the reduced point.
  double signed_distance(const Point& z, double cap) const;

  // Same queries on raw half-plane coordinates of the half-plane mirror of the garden.
  bool contains_hp(double x, double y) const;
  double signed_distance_hp(double x, double y, double cap) const;

  // The garden expressed in the half-plane model (identity for half-plane gardens).
  const Garden& half_plane_mirror() const;
  // Disk garden with every ball of disk diameter >= h_min. Exact for queries on
  // circles |z| = r with 1 - r >= h_min.
  Garden truncated_disk(double h_min) const;

 private:
  struct Index;
  Kind kind_ = Kind::Explicit;
  Model model_ = Model::HalfPlane;
  double separation_ = kInf;
  bool periodic_ = false;
  double eps_ = 0.0;
  std::vector<Horoball> balls_;
  std::string label_ = "none";
  std::shared_ptr<const Index> index_;
  std::shared_ptr<const Garden> mirror_;

  void build_index();
};

struct SeparationReport {
  bool ok = true;
  double min_distance = kInf;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // offending pair (ball indices)
  long shift = 0;  // period shift applied to the second ball of the pair
};

SeparationReport verify_separation(const Garden& G, double R);

// Ford balls at p/q, q <= Q, one period [0,1), diameters e^{-R/2}/q^2.
Garden build_ford_garden(double R, int Q);
Garden build_modular_ford_garden(double R);
// One ball of diameter h at each integer; requires h < e^{-R/2}.
Garden build_halfplane_periodic(double h, double R);

// Angular measure of {theta : r e^{i theta} in G} for a disk garden.
double circle_slice_measure(const Garden& G, double r);
// (1/|log(1-r)|) int_0^r |G cap S_s| ds/(1-s).
double cesaro_average(const Garden& G, double r, double rel_tol = 1e-9);
// Hyperbolic length of [0, r_max e^{i theta}] inside G over the length of the segment.
double radial_wiggliness(const Garden& G, double theta, double r_max);

class GardenSpecError : public std::invalid_argument {
 public:
  GardenSpecError(const std::string& what, std::string token)
      : std::invalid_argument(what), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// Builtin specifiers: "none", "ford:R=<r>,Q=<q>", "ford:R=<r>" (modular, no truncation),
// "halfplane-periodic:h=<h>,R=<r>"; anything else is read as a garden file path.
Garden parse_garden_spec(const std::string& spec);
Garden read_garden(std::istream& in);
void write_garden(std::ostream& out, const Garden& G);

}  // namespace hgarden
