#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hgarden/geometry.hpp"

using namespace hgarden;

namespace {

Point random_disk_point(std::mt19937_64& g) {
  std::uniform_real_distribution<double> r(0.0, 0.999), th(-kPi, kPi);
  return Point::disk(std::polar(r(g), th(g)));
}

}  // namespace

TEST(Distance, IdentityAndClosedForms) {
  EXPECT_EQ(hyp_distance(Point::disk(0.0), Point::disk(0.0)), 0.0);
  EXPECT_NEAR(hyp_distance(Point::disk(0.0), Point::disk(0.5)), std::log(3.0), 1e-14);
  EXPECT_NEAR(hyp_distance(Point::half_plane({0, 1}), Point::half_plane({0, 4})), std::log(4.0), 1e-14);
}

TEST(Distance, NearBoundaryStaysAccurate) {
  double r = 1.0 - 1e-12;
  EXPECT_NEAR(hyp_distance(Point::disk(0.0), Point::disk(r)), std::log((1.0 + r) / (1.0 - r)), 1e-6);
}

TEST(Convert, CayleyOriginAndRoundTrip) {
  Point w = convert(Point::disk(0.0), Model::HalfPlane);
  EXPECT_NEAR(std::abs(w.coord - cplx(0, 1)), 0.0, 1e-15);
  std::mt19937_64 g(1);
  for (int i = 0; i < 200; ++i) {
    Point p = random_disk_point(g);
    Point back = convert(convert(p, Model::HalfPlane), Model::Disk);
    EXPECT_NEAR(std::abs(back.coord - p.coord), 0.0, 1e-12);
  }
}

TEST(Convert, IsometryOnRandomPairs) {
  std::mt19937_64 g(2);
  for (int i = 0; i < 200; ++i) {
    Point p = random_disk_point(g), q = random_disk_point(g);
    double d = hyp_distance(p, q);
    double dh = hyp_distance(convert(p, Model::HalfPlane), convert(q, Model::HalfPlane));
    EXPECT_NEAR(d, dh, 1e-10 * std::max(1.0, d));
  }
}

TEST(Convert, RejectsPointsOffTheModel) {
  EXPECT_THROW(Point::disk(1.0), std::invalid_argument);
  EXPECT_THROW(Point::half_plane({0.0, -1.0}), std::invalid_argument);
}

TEST(Horoball, HalfPlaneSignedDistance) {
  Horoball B = Horoball::half_plane_infinity(1.0);
  EXPECT_NEAR(horoball_distance(B, Point::half_plane({0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(horoball_distance(B, Point::half_plane({0, std::exp(-2.0)})), 2.0, 1e-14);
  EXPECT_NEAR(horoball_distance(B, Point::half_plane({3, std::exp(1.5)})), -1.5, 1e-14);
}

TEST(Horoball, DiskDistanceMatchesHalfPlaneConjugate) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> th(-kPi, kPi), h(0.01, 0.9);
  for (int i = 0; i < 100; ++i) {
    Horoball B = Horoball::disk_angle(th(g), h(g));
    Point z = random_disk_point(g);
    Horoball Bh = convert(B, Model::HalfPlane);
    Point zh = convert(z, Model::HalfPlane);
    // half-plane oracle: log(|w - x|^2 / (D Im w)) or log(a / Im w)
    double oracle = Bh.at_infinity ? std::log(Bh.size / zh.coord.imag())
                                   : std::log(std::norm(zh.coord - Bh.base.real()) / (Bh.size * zh.coord.imag()));
    EXPECT_NEAR(horoball_distance(B, z), oracle, 1e-9);
  }
}

TEST(Horoball, DiskTopPointAndCenter) {
  Horoball B = Horoball::disk(cplx(0, 1), 0.3);
  EXPECT_NEAR(std::abs(B.top().coord - cplx(0, 0.7)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(B.center() - cplx(0, 0.85)), 0.0, 1e-15);
  EXPECT_NEAR(horoball_distance(B, B.top()), 0.0, 1e-12);
}

TEST(Inflate, HalfPlaneInfinityLaw) {
  Horoball B = Horoball::half_plane_infinity(1.0);
  for (double s : {0.5, 1.0, 3.0}) EXPECT_NEAR(horoball_inflate(B, s).size, std::exp(-s), 1e-14);
  EXPECT_EQ(horoball_inflate(B, 0.0), B);
}

TEST(Inflate, DiskDiameterMatchesConjugationOracle) {
  double h = 0.01, s = 2.0;
  Horoball I = horoball_inflate(Horoball::disk(1.0, h), s);
  // Cayley sends base 1 to 0 and the top point 1 - h to i h/(2 - h)
  double D = h / (2.0 - h) * std::exp(s);
  EXPECT_NEAR(I.size, 2.0 * D / (1.0 + D), 1e-10);
  EXPECT_NEAR(std::abs(I.base - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Inflate, DistanceShiftsBySAndKeepsBase) {
  Horoball B = Horoball::disk_angle(1.1, 0.2);
  Point z = Point::disk({0.1, -0.2});
  Horoball I = horoball_inflate(B, 0.7);
  EXPECT_NEAR(horoball_distance(I, z), horoball_distance(B, z) - 0.7, 1e-12);
  EXPECT_NEAR(std::abs(I.base - B.base), 0.0, 1e-15);
}

TEST(Mobius, IdentityRotationAndTopPoint) {
  Point p = Point::disk({0.3, -0.4});
  EXPECT_NEAR(std::abs(mobius_apply(MobiusMap::identity(Model::Disk), p).coord - p.coord), 0.0, 1e-15);
  MobiusMap rot = MobiusMap::disk_rotation(0.9);
  EXPECT_NEAR(std::abs(mobius_apply(rot, p).coord), std::abs(p.coord), 1e-15);
  Horoball B = Horoball::disk_angle(0.2, 0.4);
  Point img_top = mobius_apply(rot, B.top());
  EXPECT_NEAR(std::abs(img_top.coord - mobius_apply(rot, B).top().coord), 0.0, 1e-14);
}

TEST(Mobius, AutomorphismsPreserveDistanceAndHoroballs) {
  MobiusMap m = MobiusMap::disk_to_origin({0.4, 0.3});
  EXPECT_NEAR(std::abs(mobius_apply(m, Point::disk({0.4, 0.3})).coord), 0.0, 1e-14);
  Point a = Point::disk({-0.5, 0.1}), b = Point::disk({0.2, 0.6});
  EXPECT_NEAR(hyp_distance(mobius_apply(m, a), mobius_apply(m, b)), hyp_distance(a, b), 1e-11);
  Horoball B = Horoball::disk_angle(2.0, 0.3);
  EXPECT_NEAR(horoball_distance(mobius_apply(m, B), mobius_apply(m, a)), horoball_distance(B, a), 1e-10);
  MobiusMap hp = MobiusMap::half_plane(2.0, 1.0, 1.0, 1.0);
  Point w = Point::half_plane({0.3, 0.8}), v = Point::half_plane({-1.0, 2.0});
  EXPECT_NEAR(hyp_distance(mobius_apply(hp, w), mobius_apply(hp, v)), hyp_distance(w, v), 1e-11);
  MobiusMap id = compose(hp, hp.inverse());
  EXPECT_NEAR(std::abs(mobius_apply(id, w).coord - w.coord), 0.0, 1e-13);
}

TEST(Mobius, RejectsNonAutomorphisms) {
  EXPECT_THROW(MobiusMap::half_plane(1.0, 0.0, 0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(mobius_apply(MobiusMap::identity(Model::HalfPlane), Point::disk(0.0)), ModelMismatch);
}
