#include "hgarden/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace hgarden {

namespace {

constexpr std::size_t kMaxSegments = 4000;

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Gauss-Kronrod 21/10 on [a, b] with QUADPACK error scaling.
Segment gk21(const Integrand& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  double center = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double fc = f(center);
  double resk = fc * wk[0];
  double resg = 0.0;
  double resabs = std::abs(resk);
  double fv1[11], fv2[11];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    double dx = half * xk[i];
    double f1 = f(center - dx);
    double f2 = f(center + dx);
    fv1[i] = f1;
    fv2[i] = f2;
    resk += wk[i] * (f1 + f2);
    resabs += wk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) resg += wg[i / 2] * (f1 + f2);
  }
  double mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    resasc += wk[i] * (std::abs(fv1[i] - mean) + std::abs(fv2[i] - mean));
  }
  double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
  return Segment{a, b, value, err};
}

[[noreturn]] void fail(const char* rule, double err, double target) {
  std::ostringstream os;
  os << rule << " did not converge: error estimate " << err << " against target " << target;
  throw QuadratureError(os.str(), err, target);
}

double adaptive(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  std::priority_queue<Segment> heap;
  Segment s0 = gk21(f, a, b);
  double total = s0.value, total_err = s0.error;
  heap.push(s0);
  double eps = std::numeric_limits<double>::epsilon();
  while (total_err > std::max(rel_tol * std::abs(total), abs_tol)) {
    if (heap.size() >= kMaxSegments) fail("gauss-kronrod", total_err, std::max(rel_tol * std::abs(total), abs_tol));
    Segment s = heap.top();
    double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 4.0 * eps * std::max(std::abs(s.a), std::abs(s.b))) {
      // Interval exhausted at machine resolution; accept only if the remainder is round-off.
      if (total_err <= 1e3 * eps * std::abs(total) + abs_tol) break;
      fail("gauss-kronrod", total_err, std::max(rel_tol * std::abs(total), abs_tol));
    }
    heap.pop();
    Segment l = gk21(f, s.a, mid);
    Segment r = gk21(f, mid, s.b);
    total += l.value + r.value - s.value;
    total_err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
  }
  // Resum to shed accumulated cancellation from the running updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  if (!std::isfinite(sum)) fail("gauss-kronrod", std::numeric_limits<double>::infinity(), rel_tol);
  return sum;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, rel_tol, abs_tol);
  if (std::isinf(b)) {
    // x = a + u / (1 - u), u in [0, 1)
    auto g = [&](double u) {
      double one_minus = 1.0 - u;
      double x = a + u / one_minus;
      double v = f(x);
      return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return adaptive(g, 0.0, 1.0, rel_tol, abs_tol);
  }
  return adaptive(f, a, b, rel_tol, abs_tol);
}

double integrate_endpoint_singular(const Integrand& f, double a, double b, double rel_tol,
                                   double abs_tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0, l1 = 0.0;
  double v = rule.integrate(f, a, b, rel_tol, &err, &l1);
  double target = std::max(rel_tol * l1, abs_tol);
  if (!std::isfinite(v) || err > target) fail("tanh-sinh", err, target);
  return v;
}

double integrate_pieces(const Integrand& f, const std::vector<double>& breaks, double rel_tol,
                        double abs_tol) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += integrate(f, breaks[i], breaks[i + 1], rel_tol, abs_tol);
  }
  return total;
}

}  // namespace hgarden
