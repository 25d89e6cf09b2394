#include "hgarden/feynman_kac.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

namespace hgarden {

Potential Potential::garden_indicator(std::shared_ptr<const Garden> g) {
  if (!g) throw std::invalid_argument("garden indicator needs a garden");
  Potential v;
  v.kind_ = Kind::GardenIndicator;
  v.garden_ = std::move(g);
  return v;
}

Potential Potential::constant(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("constant potential must be finite and >= 0");
  Potential v;
  v.kind_ = Kind::Constant;
  v.alpha_ = alpha;
  return v;
}

Potential Potential::scaled(double p, const Potential& inner) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("potential scale must be finite and >= 0");
  Potential v;
  v.kind_ = Kind::Scaled;
  v.p_ = p;
  v.inner_ = std::make_shared<const Potential>(inner);
  return v;
}

double Potential::total_scale() const {
  switch (kind_) {
    case Kind::GardenIndicator: return 1.0;
    case Kind::Constant: return alpha_;
    case Kind::Scaled: return p_ * inner_->total_scale();
  }
  return 0.0;
}

const Garden* Potential::base_garden() const {
  switch (kind_) {
    case Kind::GardenIndicator: return garden_.get();
    case Kind::Constant: return nullptr;
    case Kind::Scaled: return inner_->base_garden();
  }
  return nullptr;
}

Model Potential::model() const {
  const Garden* g = base_garden();
  return g ? g->model() : Model::HalfPlane;
}

double Potential::bound() const {
  const Garden* g = base_garden();
  if (g && g->is_empty()) return 0.0;
  return total_scale();
}

double Potential::value(const Point& x) const {
  const Garden* g = base_garden();
  if (!g) return total_scale();
  if (g->is_empty()) return 0.0;
  return g->contains(x) ? total_scale() : 0.0;
}

Point default_origin(Model m) {
  return m == Model::Disk ? Point::disk(cplx(0.0, 0.0)) : Point::half_plane(cplx(0.0, 1.0));
}

namespace {

void check_start(const Potential& V, const Point& x0) {
  const Garden* g = V.base_garden();
  if (g && !g->is_empty() && g->model() != x0.model) throw ModelMismatch("potential and start point in different models");
}

// Occupation of the base garden at each checkpoint, per path.
std::vector<std::vector<double>> occupations(const Potential& V, const Point& x0, const std::vector<double>& ts,
                                             const McConfig& cfg) {
  GardenRegion R(*V.base_garden());
  McConfig c = cfg;
  c.T = *std::max_element(ts.begin(), ts.end());
  return simulate_occupation(x0, {&R}, c, ts);
}

}  // namespace

FkEstimate feynman_kac_estimate(const Point& x0, double t, const Potential& V, const McConfig& cfg, double rel_tol) {
  if (!(t > 0.0)) throw std::invalid_argument("feynman_kac_estimate needs t > 0");
  if (cfg.n_paths < 1) throw std::invalid_argument("feynman_kac_estimate needs N >= 1");
  check_start(V, x0);
  FkEstimate out;
  out.estimate.n_samples = cfg.n_paths;
  out.estimate.t = t;
  out.estimate.seed = cfg.seed;
  const Garden* g = V.base_garden();
  double scale = V.total_scale();
  if (!g || g->is_empty() || scale == 0.0) {
    // deterministic integrand
    out.log_value = g ? 0.0 : scale * t;
    out.estimate.value = std::exp(out.log_value);
    return out;
  }
  auto occ = occupations(V, x0, {t}, cfg);
  std::vector<double> w;
  w.reserve(occ.size());
  for (const auto& row : occ) w.push_back(scale * row[0]);
  LogMean lm = log_mean_exp(w);
  out.log_value = lm.log_mean;
  out.log_se = lm.log_se;
  out.estimate.value = lm.mean;
  out.estimate.std_error = lm.se;
  out.tolerance_ok = lm.log_se <= rel_tol;
  if (out.log_value > scale * t + 1e-12) throw std::logic_error("Feynman-Kac estimate exceeds e^{p t |V|}");
  return out;
}

std::vector<SpectrumFit> lyapunov_exponents(const Potential& V, const std::vector<double>& p_list,
                                            const std::vector<double>& t_grid, const McConfig& cfg, const Point* x0) {
  if (t_grid.size() < 4) throw std::invalid_argument("lyapunov_exponent needs at least 4 times");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()) || !(t_grid.front() > 0.0)) {
    throw std::invalid_argument("t_grid must be positive and increasing");
  }
  if (t_grid.back() < 2.0 * t_grid.front()) throw std::invalid_argument("t_grid must span a factor 2");
  Point start = x0 ? *x0 : default_origin(V.model());
  check_start(V, start);
  const Garden* g = V.base_garden();
  bool deterministic = !g || g->is_empty();
  std::vector<std::vector<double>> occ;
  if (!deterministic) occ = occupations(V, start, t_grid, cfg);
  std::size_t first = t_grid.size() / 2;
  std::vector<SpectrumFit> fits;
  for (double p : p_list) {
    if (!(p >= 0.0)) throw std::invalid_argument("p must be >= 0");
    double scale = p * V.total_scale();
    std::vector<double> lv, ls;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      if (deterministic || scale == 0.0) {
        lv.push_back(g ? 0.0 : scale * t_grid[k]);
        ls.push_back(0.0);
        continue;
      }
      std::vector<double> w;
      w.reserve(occ.size());
      for (const auto& row : occ) w.push_back(scale * row[k]);
      LogMean lm = log_mean_exp(w);
      lv.push_back(lm.log_mean);
      ls.push_back(lm.log_se);
    }
    SpectrumFit f = fit_growth(t_grid, lv, ls, first);
    f.p = p;
    for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
      double noise = 3.0 * std::hypot(ls[k], ls[k + 1]);
      if (lv[k + 1] < lv[k] - noise) {
        f.warning = true;
        f.note = "log-estimates not monotone in t beyond noise";
      }
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

SpectrumFit lyapunov_exponent(const Potential& V, double p, const std::vector<double>& t_grid, const McConfig& cfg,
                              const Point* x0) {
  return lyapunov_exponents(V, {p}, t_grid, cfg, x0).front();
}

double nonconcentration_ratio(const Horoball& B, double R, const Point& x0, double t) {
  if (!(R >= 0.0)) throw std::invalid_argument("R must be >= 0");
  Horoball star = horoball_inflate(B, 0.5 * R);
  double d_star = horoball_distance(star, x0);
  if (std::abs(d_star) > 1e-8) throw std::invalid_argument("x0 must lie on the boundary of B*");
  if (R == 0.0) return 1.0;
  double d = horoball_distance(B, x0);
  return occupation_integral_depth(d, t, 1e-10) / occupation_integral_depth(d_star, t, 1e-10);
}

double nonconcentration_ratio(const Horoball& B, const Garden& G, const Point& x0, double t) {
  bool member = false;
  if (G.kind() == Garden::Kind::ModularFord) {
    double eps = G.epsilon();
    if (B.model == Model::HalfPlane && B.at_infinity) {
      member = std::abs(B.size * eps - 1.0) < 1e-9;
    } else if (B.model == Model::HalfPlane) {
      double q = std::sqrt(eps / B.size);
      double qr = std::round(q);
      member = qr >= 1.0 && std::abs(q - qr) < 1e-6 * qr &&
               std::abs(B.base.real() * qr - std::round(B.base.real() * qr)) < 1e-6;
    }
  } else {
    for (const Horoball& b : G.balls()) {
      if (b.model != B.model || b.at_infinity != B.at_infinity) continue;
      double db = std::abs(b.base - B.base);
      if (G.periodic()) db = std::abs(std::remainder(b.base.real() - B.base.real(), 1.0));
      if (db < 1e-12 && std::abs(b.size - B.size) <= 1e-12 * b.size) member = true;
    }
  }
  if (!member) throw std::invalid_argument("horoball is not a member of the garden");
  return nonconcentration_ratio(B, G.separation(), x0, t);
}

WigglyReport wiggly_lower_bound(const Potential& V, double alpha, double R, const std::vector<double>& p_grid,
                                const std::vector<double>& t_grid, const McConfig& cfg, std::size_t n_centres) {
  if (!(R > 0.0) || n_centres == 0) throw std::invalid_argument("wiggly_lower_bound needs R > 0 and centres");
  WigglyReport rep;
  rep.alpha = alpha;
  rep.R = R;
  const Garden* g = V.base_garden();
  double scale = V.total_scale();
  // Hyperbolic polar quadrature of V over B(c, R): Gauss-Legendre in r, uniform in angle.
  using GL = boost::math::quadrature::gauss<double, 30>;
  auto ball_integral = [&](cplx c) {
    if (!g) return scale * 2.0 * kPi * (std::cosh(R) - 1.0);
    if (g->is_empty()) return 0.0;
    constexpr int kTheta = 96;
    double sum = 0.0;
    auto radial = [&](double r) {
      double rr = std::tanh(0.5 * r);
      int hits = 0;
      for (int j = 0; j < kTheta; ++j) {
        cplx zd = std::polar(rr, 2.0 * kPi * (j + 0.5) / kTheta);
        cplx w = cayley(zd);
        cplx pt(c.real() + c.imag() * w.real(), c.imag() * w.imag());
        if (g->contains_hp(pt.real(), pt.imag())) ++hits;
      }
      return 2.0 * kPi * hits / kTheta * std::sinh(r);
    };
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (i == 0 && sgn == 1 && xs[0] == 0.0) continue;
        double r = 0.5 * R * (1.0 + sgn * xs[i]);
        sum += ws[i] * radial(r);
      }
    }
    return scale * 0.5 * R * sum;
  };
  // Centres: a fixed low-discrepancy set over the region that represents the garden.
  rep.min_ball_integral = kInf;
  for (std::size_t k = 0; k < n_centres; ++k) {
    double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n_centres);
    double v = std::fmod(0.5 + static_cast<double>(k) * 0.6180339887498949, 1.0);
    cplx c;
    if (g && g->kind() == Garden::Kind::ModularFord) {
      double y_top = 1.0 / g->epsilon() * std::exp(R);
      double y = 0.8660254037844386 * std::pow(y_top / 0.8660254037844386, u);
      c = cplx(v - 0.5, y);
    } else if (g && g->model() == Model::Disk) {
      c = cayley(std::polar(0.999 * std::sqrt(u), 2.0 * kPi * v));
    } else {
      c = cplx(v, std::exp(-6.0 + 12.0 * u));
    }
    rep.min_ball_integral = std::min(rep.min_ball_integral, ball_integral(c));
  }
  rep.wiggly = rep.min_ball_integral >= alpha;
  rep.fits = lyapunov_exponents(V, p_grid, t_grid, cfg);
  bool any = false;
  for (const SpectrumFit& f : rep.fits) {
    if (!(f.p > 0.0)) continue;
    double p2 = f.p * f.p;
    double c = f.beta_hat / p2;
    if (!any || c < rep.c_hat) {
      rep.c_hat = c;
      rep.c_lo = f.ci_lo / p2;
      rep.c_hi = f.ci_hi / p2;
      any = true;
    }
  }
  rep.positive = any && rep.c_lo > 0.0;
  return rep;
}

}  // namespace hgarden
