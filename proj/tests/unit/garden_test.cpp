#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hgarden/garden.hpp"
#include "hgarden/stats.hpp"

using namespace hgarden;

namespace {

// Minimum hyperbolic distance between the boundary circles of two finite half-plane
// horoballs, by a grid search followed by coordinate refinement.
double numeric_pair_distance(double x1, double d1, double x2, double d2) {
  auto pt = [](double x, double d, double th) {
    return Point::half_plane(cplx(x + 0.5 * d * std::sin(th), 0.5 * d * (1.0 - std::cos(th))));
  };
  auto dist = [&](double a, double b) { return hyp_distance(pt(x1, d1, a), pt(x2, d2, b)); };
  double best = kInf, ba = 0.0, bb = 0.0;
  const int n = 400;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      double a = 2.0 * kPi * i / n, b = 2.0 * kPi * j / n;
      double d = dist(a, b);
      if (d < best) best = d, ba = a, bb = b;
    }
  }
  for (double step = 2.0 * kPi / n; step > 1e-12; step *= 0.5) {
    for (int it = 0; it < 4; ++it) {
      for (double da : {-step, step}) {
        if (dist(ba + da, bb) < best) best = dist(ba + da, bb), ba += da;
      }
      for (double db : {-step, step}) {
        if (dist(ba, bb + db) < best) best = dist(ba, bb + db), bb += db;
      }
    }
  }
  return best;
}

}  // namespace

TEST(PairDistance, TangentFordCircles) {
  EXPECT_NEAR(horoball_pair_distance(Horoball::half_plane(0, 1), Horoball::half_plane(1, 1)).distance, 0.0, 1e-14);
  EXPECT_NEAR(horoball_pair_distance(Horoball::half_plane(0, 1), Horoball::half_plane(0.5, 0.25)).distance, 0.0,
              1e-14);
}

TEST(PairDistance, MatchesNumericGeodesicOracle) {
  double formula = horoball_pair_distance(Horoball::half_plane(0, 0.1), Horoball::half_plane(1, 0.2)).distance;
  EXPECT_NEAR(formula, std::log(1.0 / 0.02), 1e-12);
  EXPECT_NEAR(formula, numeric_pair_distance(0, 0.1, 1, 0.2), 1e-6);
}

TEST(PairDistance, ConcentricAndDegenerate) {
  auto d = horoball_pair_distance(Horoball::half_plane_infinity(1.0), Horoball::half_plane_infinity(std::exp(-2.0)));
  EXPECT_NEAR(d.distance, 2.0, 1e-14);
  EXPECT_TRUE(horoball_pair_distance(Horoball::disk(1.0, 0.3), Horoball::disk(1.0, 0.3)).degenerate);
}

TEST(PairDistance, DiskAgreesWithHalfPlaneImages) {
  Horoball a = Horoball::disk_angle(0.3, 0.2), b = Horoball::disk_angle(2.0, 0.05);
  double dd = horoball_pair_distance(a, b).distance;
  double dh = horoball_pair_distance(convert(a, Model::HalfPlane), convert(b, Model::HalfPlane)).distance;
  EXPECT_NEAR(dd, dh, 1e-10);
}

TEST(Ford, UnitDepthGivesIntegersAtDistanceR) {
  Garden G = build_ford_garden(4.0, 1);
  ASSERT_EQ(G.balls().size(), 1u);
  EXPECT_NEAR(G.balls()[0].size, std::exp(-2.0), 1e-15);
  SeparationReport rep = verify_separation(G, 4.0 - 1e-9);
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.min_distance, 4.0, 1e-12);
}

TEST(Ford, BuiltGardensPassSeparation) {
  for (double R : {1.0, 2.0, 4.0, 6.0}) {
    for (int Q : {1, 3, 5, 10}) {
      Garden G = build_ford_garden(R, Q);
      EXPECT_TRUE(verify_separation(G, R - 1e-9).ok) << "R=" << R << " Q=" << Q;
      EXPECT_FALSE(verify_separation(G, R + 1e-6).ok) << "R=" << R << " Q=" << Q;
    }
  }
}

TEST(Ford, TangencyLimit) {
  Garden G = build_ford_garden(1e-9, 4);
  EXPECT_NEAR(verify_separation(G, 0.0).min_distance, 0.0, 1e-8);
}

TEST(Separation, EmptyAndOffendingPair) {
  EXPECT_TRUE(verify_separation(Garden::empty(), 3.0).ok);
  Garden G = Garden::from_balls(Model::HalfPlane, {Horoball::half_plane(0, 1), Horoball::half_plane(1, 1)}, 0.5);
  SeparationReport rep = verify_separation(G, 1.0);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.pair.has_value());
  EXPECT_EQ(rep.pair->first, 0u);
  EXPECT_EQ(rep.pair->second, 1u);
}

TEST(Modular, ContainmentAgreesWithExplicitFord) {
  double R = 3.0;
  Garden M = build_modular_ford_garden(R);
  Garden F = build_ford_garden(R, 40);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    double x = (i * 0.618033988749895) - std::floor(i * 0.618033988749895);
    double y = std::exp(-0.5 * R) * std::pow(0.93, i % 40);
    if (y < 1.0 / (40.0 * 40.0)) continue;  // below the depth the explicit list covers
    EXPECT_EQ(M.contains_hp(x, y), F.contains_hp(x, y)) << x << " " << y;
    ++checked;
  }
  EXPECT_GT(checked, 200);
  EXPECT_TRUE(M.contains_hp(0.3, 2.0 / std::exp(-0.5 * R)));
}

TEST(SliceMeasure, EmptyGardenIsZero) {
  Garden G = Garden::empty(Model::Disk);
  for (double r : {0.1, 0.5, 0.99}) EXPECT_EQ(circle_slice_measure(G, r), 0.0);
}

TEST(SliceMeasure, MatchesDenseAngularSampling) {
  Horoball B = Horoball::disk(1.0, 0.1);
  Garden G = Garden::from_balls(Model::Disk, {B}, kInf);
  double r = 0.97;
  // the arc lies inside |theta| < 0.2: 1e6 samples there resolve it to 4e-7
  const int n = 1000000;
  double w = 0.4 / n, hits = 0.0;
  for (int i = 0; i < n; ++i) {
    double th = -0.2 + (i + 0.5) * w;
    if (horoball_contains(B, Point::disk(std::polar(r, th)))) hits += 1.0;
  }
  EXPECT_NEAR(circle_slice_measure(G, r), hits * w, 1e-6);
}

TEST(SliceMeasure, CesaroDecaysLikeExpMinusHalfR) {
  std::vector<double> x, y;
  for (double R : {2.0, 4.0, 6.0, 8.0}) {
    double h_min = 1e-6;
    Garden D = build_modular_ford_garden(R).truncated_disk(h_min);
    x.push_back(0.5 * R);
    y.push_back(std::log(cesaro_average(D, 1.0 - h_min)));
  }
  double slope = linear_fit(x, y).slope;
  EXPECT_GE(slope, -1.2);
  EXPECT_LE(slope, -0.8);
}

TEST(Wiggliness, EmptyMissAndHit) {
  EXPECT_EQ(radial_wiggliness(Garden::empty(Model::Disk), 0.3, 0.9), 0.0);
  Garden G = Garden::from_balls(Model::Disk, {Horoball::disk(1.0, 0.2)}, kInf);
  EXPECT_EQ(radial_wiggliness(G, kPi, 0.99), 0.0);
  double prev = 0.0;
  for (int k = 3; k <= 8; ++k) {
    double v = radial_wiggliness(G, 0.0, 1.0 - std::pow(10.0, -k));
    EXPECT_GT(v, prev);
    prev = v;
  }
  // the ray enters the ball at r = 1 - h
  double r = 1.0 - 1e-8;
  EXPECT_NEAR(prev, 1.0 - std::atanh(0.8) / std::atanh(r), 1e-9);
}

TEST(GardenSpec, BuiltinsAndErrors) {
  EXPECT_TRUE(parse_garden_spec("none").is_empty());
  EXPECT_EQ(parse_garden_spec("ford:R=4,Q=10").label(), "ford:R=4,Q=10");
  EXPECT_EQ(parse_garden_spec("ford:R=4").kind(), Garden::Kind::ModularFord);
  EXPECT_EQ(parse_garden_spec("halfplane-periodic:h=0.1,R=4").balls().size(), 1u);
  try {
    parse_garden_spec("ford:R=4,Q=1x0");
    FAIL();
  } catch (const GardenSpecError& e) {
    EXPECT_NE(std::string(e.what()).find("1x0"), std::string::npos);
  }
  EXPECT_THROW(parse_garden_spec("ford:R=4,Z=3"), GardenSpecError);
  EXPECT_THROW(parse_garden_spec("/nonexistent/garden.txt"), GardenSpecError);
}

TEST(GardenSpec, FileRoundTrip) {
  Garden G = build_ford_garden(3.0, 4);
  std::ostringstream out;
  out << "# a comment line\n";
  write_garden(out, G);
  std::istringstream in(out.str());
  Garden H = read_garden(in);
  ASSERT_EQ(H.balls().size(), G.balls().size());
  EXPECT_EQ(H.separation(), G.separation());
  EXPECT_EQ(H.periodic(), G.periodic());
  for (std::size_t i = 0; i < G.balls().size(); ++i) EXPECT_EQ(H.balls()[i], G.balls()[i]);
}

TEST(GardenDistance, SignedDistanceInsideAndOutside) {
  Garden G = build_ford_garden(4.0, 1);
  double h = std::exp(-2.0);
  EXPECT_NEAR(G.signed_distance(Point::half_plane({0.0, 0.5 * h}), 10.0), -std::log(2.0), 1e-12);
  EXPECT_NEAR(G.signed_distance(Point::half_plane({1.0, 2.0 * h}), 10.0), std::log(2.0), 1e-12);
  EXPECT_EQ(G.signed_distance(Point::half_plane({0.5, 1e-9}), 3.0), 3.0);
}
