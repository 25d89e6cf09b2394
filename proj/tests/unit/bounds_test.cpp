#include <gtest/gtest.h>

#include <cmath>

#include "hgarden/bounds.hpp"
#include "hgarden/dynkin.hpp"
#include "hgarden/kernels.hpp"
#include "hgarden/quadrature.hpp"
#include "hgarden/stats.hpp"

using namespace hgarden;

namespace {

double log_slope(const std::vector<double>& x, const std::vector<double>& v) {
  std::vector<double> y;
  for (double a : v) y.push_back(std::log(a));
  return linear_fit(x, y).slope;
}

// Overlap of the crossing disks |w| < a and |w - d| < b by vertical chords. Left of the
// radical line the chord belongs to the disk whose extreme point is the left end, right
// of it to the other; each piece is integrated in the gap s to its extreme point.
double lens_oracle(double d, double a, double b) {
  double lo = std::max(-a, d - b), hi = std::min(a, d + b);
  double xa = (d * d + a * a - b * b) / (2.0 * d);
  if (!(xa > lo && xa < hi)) return std::nan("");
  double rl = lo == d - b ? b : a, rr = hi == a ? a : b;
  // s = u^2 removes the square-root endpoint
  auto chord = [](double rho) { return [rho](double u) { return 4.0 * u * u * std::sqrt(2.0 * rho - u * u); }; };
  return integrate(chord(rl), 0.0, std::sqrt(xa - lo), 1e-12) + integrate(chord(rr), 0.0, std::sqrt(hi - xa), 1e-12);
}

}  // namespace

TEST(V2Bound, ThreeCases) {
  V2Params prm;
  prm.delta = 0.01;
  double k = 0.05, R = 4.0;
  cplx p = 2.0;
  double K = k * k * 4.0;
  Garden G = build_ford_garden(R, 3);
  double h = std::exp(-0.5 * R);
  EXPECT_NEAR(v2_bound(Point::half_plane({0.0, 0.5 * h}), k, p, R, G, prm), K + prm.delta, 1e-15);
  EXPECT_NEAR(v2_bound(Point::disk(0.2), k, p, R, G.truncated_disk(1e-3), prm), 18.0 * K + prm.delta, 1e-15);
  Garden D = Garden::from_balls(Model::Disk, {Horoball::disk(1.0, 0.01)}, kInf);
  double far1 = v2_bound(Point::disk(-0.9), k, p, R, D, prm);
  double far2 = v2_bound(Point::disk({0.0, 0.8}), k, p, R, D, prm);
  EXPECT_EQ(far1, far2);
  EXPECT_NEAR(far1, K * std::exp(-v2_gamma(k, prm) * 0.5 * R) + prm.delta, 1e-15);
  EXPECT_THROW(v2_bound(Point::disk(0.9), 0.5, p, R, D, prm), std::invalid_argument);
}

TEST(Freezing, ZeroDilatationIsFrozen) {
  Horoball B = Horoball::disk(1.0, 0.01);
  FreezingReport r = freezing_check(0.0, 1.0, B, 4.0);
  EXPECT_NEAR(r.ratio_to_frozen, 1.0, 1e-9);
  Horoball star = horoball_inflate(B, 2.0);
  EXPECT_NEAR(r.frozen_integral, occupation_integral(star, Point::disk(0.0), kInf), 1e-7 * r.frozen_integral);
}

TEST(Freezing, RatioToDiameterUniformInH) {
  std::vector<double> v;
  for (double h : {1e-3, 1e-4, 1e-5}) v.push_back(freezing_check(0.01, 1.0, Horoball::disk(1.0, h), 4.0).ratio_to_diam);
  for (double x : v) EXPECT_NEAR(x / v.front(), 1.0, 0.01);
}

TEST(Freezing, ShellWeightsAndNetDecay) {
  double k = 0.002;
  V2Params prm;
  FreezingReport r = freezing_check(k, 1.0, Horoball::disk(1.0, 1e-4), 8.0, prm);
  EXPECT_LE(r.weight_ratio, std::exp(-1.02));
  ASSERT_GE(r.shell_ratios.size(), 3u);
  double net = std::exp(-(1.0 - 2.0 * k - prm.eps));
  for (std::size_t m = 1; m < r.shell_ratios.size(); ++m) EXPECT_NEAR(r.shell_ratios[m] / net, 1.0, 0.02) << m;
}

TEST(Freezing, PartTwoQuotientScaling) {
  std::vector<double> x, q;
  for (double R : {2.0, 4.0, 6.0}) {
    FreezingReport r = freezing_check(0.002, 1.0, Horoball::disk(1.0, 1e-3), R);
    EXPECT_TRUE(r.part2_hypotheses);
    x.push_back(0.5 * R);
    q.push_back(r.quotient);
  }
  double s = log_slope(x, q);
  EXPECT_GE(s, -1.3);
  EXPECT_LE(s, -0.7);
}

TEST(Freezing, OutsideHypothesesIsFlagged) {
  FreezingReport r = freezing_check(0.1, 1.0, Horoball::disk(1.0, 0.01), 4.0);
  EXPECT_FALSE(r.part1_hypotheses);
  EXPECT_NE(r.note.find("outside"), std::string::npos);
}

TEST(BpQuotient, EmptyGardenSitsAtTheFloor) {
  V2Params prm;
  prm.delta = 1e-4;
  BpReport r = bp_quotient(Garden::empty(), 0.01, 1.0, 1e-3, prm);
  EXPECT_LE(r.quotient, r.floor_value * (1.0 + 1e-12));
}

TEST(BpQuotient, HalfRScalingOnModularGarden) {
  std::vector<double> x, q;
  for (double R : {2.0, 4.0, 6.0}) {
    x.push_back(0.5 * R);
    q.push_back(bp_quotient(build_modular_ford_garden(R), 0.002, 1.0, 1e-3).quotient);
  }
  double s = log_slope(x, q);
  EXPECT_GE(s, -1.3);
  EXPECT_LE(s, -0.7);
}

TEST(BpQuotient, ApproachesLimitAtInverseLogRate) {
  Garden G = build_modular_ford_garden(4.0);
  std::vector<double> u, q;
  for (double t : {1e-3, 1e-4, 1e-5}) {
    u.push_back(1.0 / std::log(2.0 / t));
    q.push_back(bp_quotient(G, 0.002, 1.0, t).quotient);
  }
  LinearFit f = linear_fit(u, q);
  double t4 = 1e-6;
  double predicted = f.intercept + f.slope / std::log(2.0 / t4);
  EXPECT_NEAR(bp_quotient(G, 0.002, 1.0, t4).quotient / predicted, 1.0, 0.005);
}

TEST(BpQuotient, ExplicitPeriodicGardenAndErrors) {
  BpReport r = bp_quotient(build_ford_garden(4.0, 10), 0.002, 1.0, 1e-3);
  EXPECT_GT(r.quotient, r.floor_value);
  EXPECT_EQ(r.balls_used, 32u);
  EXPECT_THROW(bp_quotient(build_ford_garden(4.0, 3), 0.002, 1.0, 2.5), std::invalid_argument);
  EXPECT_THROW(bp_quotient(build_ford_garden(4.0, 3).truncated_disk(1e-3), 0.002, 1.0, 0.1), ModelMismatch);
}

TEST(Dynkin, EmptySupportGivesBareScale) {
  DynkinInput in;
  in.k = 0.3;
  in.z = Point::disk(0.99);
  DynkinResult r = dynkin_bound(in, DynkinVariant::Improved);
  EXPECT_NEAR(r.value, std::pow(0.01, 0.7), 1e-15);
  EXPECT_EQ(r.tail, 0.0);
}

TEST(Dynkin, CorollaryValueAndSingleHoroball) {
  double k = 0.3, L = 10.0;
  double d = std::exp(-12.0);
  DynkinInput in;
  in.k = k;
  in.L = L;
  in.z = Point::disk(1.0 - d);
  double cor = dynkin_bound(in, DynkinVariant::Corollary).value;
  EXPECT_NEAR(cor, 0.3 * 10.0 * std::exp(-7.0) + std::exp(-12.0 * 0.7), 1e-15);
  // horoball of diameter e^{-12} whose base angle puts it at distance L from z
  double lo = 0.0, hi = 0.1;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (horoball_distance(Horoball::disk_angle(mid, d), in.z) < L ? lo : hi) = mid;
  }
  Garden G = Garden::from_balls(Model::Disk, {Horoball::disk_angle(0.5 * (lo + hi), d)}, kInf);
  in.support = &G;
  DynkinResult imp = dynkin_bound(in, DynkinVariant::Improved);
  DynkinResult cls = dynkin_bound(in, DynkinVariant::Classic);
  EXPECT_GT(imp.tail, 0.0);
  EXPECT_LE(imp.value, 10.0 * cor);
  EXPECT_LE(cls.value, 10.0 * cor);
}

TEST(Dynkin, LastShellDominates) {
  double k = 0.3;
  std::vector<double> a = dynkin_shell_terms(k, 10.0);
  double total = 0.0;
  for (double v : a) total += v;
  for (std::size_t j = 1; j < a.size(); ++j) EXPECT_GT(a[j], a[j - 1]);
  EXPECT_GT(a.back() / total, 1.0 - std::exp(-(1.0 / (1.0 + k) - (1.0 - k))));
}

TEST(Dynkin, CorollaryConvergesToScale) {
  DynkinInput in;
  in.k = 0.4;
  in.z = Point::disk(0.999);
  double scale = std::pow(0.001, 0.6);
  double prev = kInf;
  for (double L : {10.0, 20.0, 30.0, 40.0}) {
    in.L = L;
    double gap = dynkin_bound(in, DynkinVariant::Corollary).value - scale;
    EXPECT_NEAR(gap, 0.4 * L * std::exp(-0.6 * L), 1e-12 * scale);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  in.L = 200.0;
  EXPECT_NEAR(dynkin_bound(in, DynkinVariant::Corollary).value / scale, 1.0, 1e-15);
}

TEST(Dynkin, ReflectionAndLensGeometry) {
  Horoball B = Horoball::disk(1.0, 0.2);
  Circle c = reflect_horoball(B);
  // the reflection of the top point 1 - h is 1/(1 - h), the far end of the reflected disk
  EXPECT_NEAR(c.center.real() + c.radius, 1.0 / 0.8, 1e-14);
  EXPECT_NEAR(c.center.real() - c.radius, 1.0, 1e-14);
  EXPECT_THROW(reflect_horoball(Horoball::disk(1.0, 1.2)), std::invalid_argument);
  EXPECT_EQ(lens_area(3.0, 1.0, 1.0), 0.0);
  EXPECT_NEAR(lens_area(0.1, 1.0, 0.5), kPi * 0.25, 1e-15);
  for (double d : {0.3, 1.0, 1.7, 1.79}) EXPECT_NEAR(lens_area(d, 1.0, 0.8), lens_oracle(d, 1.0, 0.8), 1e-9) << d;
  EXPECT_NEAR(lens_area(1.0 - 1e-7, 1e-3, 1.0), lens_oracle(1.0 - 1e-7, 1e-3, 1.0), 1e-14);
}
