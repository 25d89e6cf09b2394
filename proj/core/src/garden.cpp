#include "hgarden/garden.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hgarden {

PairDistance horoball_pair_distance(const Horoball& a, const Horoball& b) {
  if (a.model != b.model) throw ModelMismatch("horoball_pair_distance: mixed models");
  if (a == b) return PairDistance{0.0, true};
  if (a.model == Model::Disk) {
    if (std::abs(a.base - b.base) == 0.0) return PairDistance{std::abs(a.level() - b.level()), false};
    double d = std::log(std::norm(a.base - b.base) / 4.0) - a.level() - b.level();
    return PairDistance{std::max(0.0, d), false};
  }
  if (a.at_infinity && b.at_infinity) return PairDistance{std::abs(std::log(a.size / b.size)), false};
  if (a.at_infinity || b.at_infinity) {
    const Horoball& inf = a.at_infinity ? a : b;
    const Horoball& fin = a.at_infinity ? b : a;
    return PairDistance{std::max(0.0, std::log(inf.size / fin.size)), false};
  }
  double dx = std::abs(a.base.real() - b.base.real());
  if (dx == 0.0) return PairDistance{std::abs(std::log(a.size / b.size)), false};
  return PairDistance{std::max(0.0, 2.0 * std::log(dx) - std::log(a.size * b.size)), false};
}

cplx reduce_modular(cplx z) {
  for (int it = 0; it < 4096; ++it) {
    z = cplx(z.real() - std::nearbyint(z.real()), z.imag());
    double n = std::norm(z);
    if (n >= 1.0) return z;
    z = -std::conj(z) / n;
  }
  return z;
}

struct Garden::Index {
  struct SizeClass {
    double h_max = 0.0;
    std::vector<double> bases;  // sorted
    std::vector<double> sizes;
  };
  std::vector<SizeClass> classes;
  std::vector<double> inf_heights;
  bool periodic = false;

  // Unclamped depth (negative) when inside some ball, else min(cap, distance).
  double query(double x, double y, double cap) const {
    double best = cap;
    for (double a : inf_heights) {
      double d = std::log(a / y);
      if (d < 0.0) return d;
      best = std::min(best, d);
    }
    double ec = std::exp(std::max(cap, 0.0));
    double xr = periodic ? x - std::floor(x) : x;
    for (const SizeClass& c : classes) {
      double reach = ec * c.h_max;
      if (y >= reach) continue;
      double w = std::sqrt(reach * y);
      long k_lo = 0, k_hi = 0;
      if (periodic) {
        k_lo = static_cast<long>(std::floor(xr - w));
        k_hi = static_cast<long>(std::floor(xr + w));
      }
      for (long k = k_lo; k <= k_hi; ++k) {
        double center = xr - static_cast<double>(k);
        auto lo = std::lower_bound(c.bases.begin(), c.bases.end(), center - w);
        auto hi = std::upper_bound(lo, c.bases.end(), center + w);
        for (auto it = lo; it != hi; ++it) {
          std::size_t j = static_cast<std::size_t>(it - c.bases.begin());
          double dx = center - *it;
          double d = std::log((dx * dx + y * y) / (c.sizes[j] * y));
          if (d < 0.0) return d;
          best = std::min(best, d);
        }
      }
    }
    return best;
  }
};

Garden::Garden() = default;

Garden Garden::empty(Model m) {
  Garden g;
  g.model_ = m;
  g.build_index();
  return g;
}

Garden Garden::from_balls(Model m, std::vector<Horoball> balls, double separation, bool periodic) {
  if (!(separation > 0.0)) throw std::invalid_argument("garden separation must be positive");
  if (periodic && m != Model::HalfPlane) {
    throw std::invalid_argument("periodic gardens live in the half-plane model");
  }
  for (const Horoball& b : balls) {
    if (b.model != m) throw ModelMismatch("garden ball model differs from garden model");
    if (periodic && b.at_infinity) throw std::invalid_argument("periodic gardens hold finite-base balls");
  }
  Garden g;
  g.model_ = m;
  g.separation_ = separation;
  g.periodic_ = periodic;
  if (periodic) {
    for (Horoball& b : balls) b.base = cplx(b.base.real() - std::floor(b.base.real()), 0.0);
  }
  g.balls_ = std::move(balls);
  std::ostringstream os;
  os << "explicit:n=" << g.balls_.size();
  g.label_ = os.str();
  g.build_index();
  return g;
}

Garden Garden::modular_ford(double R) {
  if (!(R > 0.6)) {
    throw std::invalid_argument("modular Ford garden needs R > 0.6 so that only the ball at infinity meets the fundamental domain");
  }
  Garden g;
  g.kind_ = Kind::ModularFord;
  g.model_ = Model::HalfPlane;
  g.separation_ = R;
  g.periodic_ = true;
  g.eps_ = std::exp(-0.5 * R);
  std::ostringstream os;
  os << "ford:R=" << R;
  g.label_ = os.str();
  return g;
}

void Garden::build_index() {
  if (kind_ != Kind::Explicit) return;
  if (model_ == Model::Disk) {
    std::vector<Horoball> hp;
    hp.reserve(balls_.size());
    for (const Horoball& b : balls_) hp.push_back(convert(b, Model::HalfPlane));
    Garden m;
    m.model_ = Model::HalfPlane;
    m.separation_ = separation_;
    m.balls_ = std::move(hp);
    m.build_index();
    mirror_ = std::make_shared<const Garden>(std::move(m));
    return;
  }
  auto idx = std::make_shared<Index>();
  idx->periodic = periodic_;
  // size classes geometric in the diameter (factor 2)
  std::vector<std::pair<int, std::size_t>> keyed;
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const Horoball& b = balls_[i];
    if (b.at_infinity) {
      idx->inf_heights.push_back(b.size);
      continue;
    }
    keyed.emplace_back(static_cast<int>(std::floor(std::log2(b.size))), i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::size_t s = 0;
  while (s < keyed.size()) {
    std::size_t e = s;
    while (e < keyed.size() && keyed[e].first == keyed[s].first) ++e;
    std::vector<std::size_t> ids;
    for (std::size_t k = s; k < e; ++k) ids.push_back(keyed[k].second);
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return balls_[a].base.real() < balls_[b].base.real();
    });
    Index::SizeClass c;
    for (std::size_t id : ids) {
      c.bases.push_back(balls_[id].base.real());
      c.sizes.push_back(balls_[id].size);
      c.h_max = std::max(c.h_max, balls_[id].size);
    }
    idx->classes.push_back(std::move(c));
    s = e;
  }
  index_ = std::move(idx);
}

const Garden& Garden::half_plane_mirror() const {
  if (model_ == Model::HalfPlane) return *this;
  return *mirror_;
}

double Garden::signed_distance_hp(double x, double y, double cap) const {
  if (kind_ == Kind::ModularFord) {
    cplx z = reduce_modular(cplx(x, y));
    double d_inf = -std::log(eps_ * z.imag());
    if (d_inf < 0.0) return std::max(d_inf, -cap);
    // every other ball of the orbit lies below height eps on the closure of the domain
    return std::min({cap, d_inf, std::log(z.imag() / eps_)});
  }
  const Garden& g = half_plane_mirror();
  if (!g.index_) return cap;
  return std::max(g.index_->query(x, y, cap), -cap);
}

bool Garden::contains_hp(double x, double y) const {
  if (kind_ == Kind::ModularFord) return reduce_modular(cplx(x, y)).imag() * eps_ > 1.0;
  const Garden& g = half_plane_mirror();
  if (!g.index_) return false;
  return g.index_->query(x, y, 0.0) < 0.0;
}

namespace {

cplx to_hp(const Point& z) { return z.model == Model::HalfPlane ? z.coord : cayley(z.coord); }

}  // namespace

bool Garden::contains(const Point& z) const {
  if (!is_empty() && z.model != model_) throw ModelMismatch("garden query: mixed models");
  cplx w = to_hp(z);
  return contains_hp(w.real(), w.imag());
}

double Garden::signed_distance(const Point& z, double cap) const {
  if (!is_empty() && z.model != model_) throw ModelMismatch("garden query: mixed models");
  cplx w = to_hp(z);
  return signed_distance_hp(w.real(), w.imag(), cap);
}

Garden Garden::truncated_disk(double h_min) const {
  if (!(h_min > 0.0)) throw std::invalid_argument("h_min must be positive");
  std::vector<Horoball> out;
  auto keep = [&](const Horoball& hp_ball) {
    Horoball d = convert(hp_ball, Model::Disk);
    if (d.size >= h_min) out.push_back(d);
  };
  constexpr std::size_t kLimit = 20'000'000;
  if (kind_ == Kind::ModularFord) {
    double eps = eps_;
    keep(Horoball::half_plane_infinity(1.0 / eps));
    long q_max = static_cast<long>(std::floor(std::sqrt(2.0 * eps / h_min))) + 1;
    for (long q = 1; q <= q_max; ++q) {
      double H = eps / (static_cast<double>(q) * q);
      double x2 = 2.0 * H / h_min - 1.0 - H;
      if (x2 < 0.0) continue;
      long p_max = static_cast<long>(std::floor(std::sqrt(x2) * q)) + 1;
      for (long p = -p_max; p <= p_max; ++p) {
        if (std::gcd(p, q) != 1) continue;
        keep(Horoball::half_plane(static_cast<double>(p) / q, H));
        if (out.size() > kLimit) throw std::length_error("truncated garden too large; raise h_min");
      }
    }
  } else if (model_ == Model::Disk) {
    for (const Horoball& b : balls_) {
      if (b.size >= h_min) out.push_back(b);
    }
  } else if (periodic_) {
    for (const Horoball& b : balls_) {
      double H = b.size;
      double x2 = 2.0 * H / h_min - 1.0 - H;
      if (x2 < 0.0) continue;
      double w = std::sqrt(x2);
      double x0 = b.base.real();
      for (long k = static_cast<long>(std::floor(-w - x0)) - 1; k <= static_cast<long>(std::ceil(w - x0)) + 1; ++k) {
        keep(Horoball::half_plane(x0 + static_cast<double>(k), H));
        if (out.size() > kLimit) throw std::length_error("truncated garden too large; raise h_min");
      }
    }
  } else {
    for (const Horoball& b : balls_) keep(b);
  }
  Garden g = Garden::from_balls(Model::Disk, std::move(out), separation_, false);
  std::ostringstream os;
  os << label_ << "|disk:h_min=" << h_min;
  g.label_ = os.str();
  return g;
}

SeparationReport verify_separation(const Garden& G, double R) {
  SeparationReport rep;
  if (G.kind() == Garden::Kind::ModularFord) {
    rep.min_distance = G.separation();
    rep.ok = G.separation() > R;
    return rep;
  }
  const Garden& hp = G.half_plane_mirror();
  const std::vector<Horoball>& balls = hp.balls();
  auto consider = [&](std::size_t i, std::size_t j, long shift, double d) {
    if (d < rep.min_distance) {
      rep.min_distance = d;
      if (!(d > R)) {
        rep.ok = false;
        rep.pair = std::make_pair(i, j);
        rep.shift = shift;
      }
    }
  };
  std::vector<std::size_t> finite, infinite;
  double h_max = 0.0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (balls[i].at_infinity) {
      infinite.push_back(i);
    } else {
      finite.push_back(i);
      h_max = std::max(h_max, balls[i].size);
    }
  }
  for (std::size_t a = 0; a < infinite.size(); ++a) {
    for (std::size_t b = a + 1; b < infinite.size(); ++b) {
      auto pd = horoball_pair_distance(balls[infinite[a]], balls[infinite[b]]);
      consider(infinite[a], infinite[b], 0, pd.distance);
    }
    for (std::size_t f : finite) {
      consider(infinite[a], f, 0, horoball_pair_distance(balls[infinite[a]], balls[f]).distance);
    }
  }
  std::sort(finite.begin(), finite.end(), [&](std::size_t a, std::size_t b) {
    return balls[a].base.real() < balls[b].base.real();
  });
  std::vector<double> xs;
  for (std::size_t f : finite) xs.push_back(balls[f].base.real());
  double r_search = std::max(R, std::isfinite(G.separation()) ? G.separation() : R) + 1.0;
  double er = std::exp(r_search);
  for (std::size_t a = 0; a < finite.size(); ++a) {
    const Horoball& ba = balls[finite[a]];
    double w = std::sqrt(er * ba.size * h_max);
    long k_lo = 0, k_hi = 0;
    if (G.periodic()) {
      k_lo = static_cast<long>(std::floor(-w - 1.0));
      k_hi = static_cast<long>(std::ceil(w + 1.0));
    }
    for (long k = k_lo; k <= k_hi; ++k) {
      double center = ba.base.real() - static_cast<double>(k);
      auto lo = std::lower_bound(xs.begin(), xs.end(), center - w);
      auto hi = std::upper_bound(lo, xs.end(), center + w);
      for (auto it = lo; it != hi; ++it) {
        std::size_t b = static_cast<std::size_t>(it - xs.begin());
        if (k == 0 && b <= a) continue;
        Horoball shifted = balls[finite[b]];
        shifted.base = cplx(shifted.base.real() + static_cast<double>(k), 0.0);
        consider(finite[a], finite[b], k, horoball_pair_distance(ba, shifted).distance);
      }
    }
  }
  return rep;
}

Garden build_ford_garden(double R, int Q) {
  if (!(R > 0.0)) throw std::invalid_argument("Ford garden needs R > 0");
  if (Q < 1) throw std::invalid_argument("Ford garden needs Q >= 1");
  double eps = std::exp(-0.5 * R);
  std::vector<Horoball> balls;
  for (long q = 1; q <= Q; ++q) {
    for (long p = 0; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      balls.push_back(Horoball::half_plane(static_cast<double>(p) / q, eps / (static_cast<double>(q) * q)));
    }
  }
  Garden g = Garden::from_balls(Model::HalfPlane, std::move(balls), R, true);
  std::ostringstream os;
  os << "ford:R=" << R << ",Q=" << Q;
  g.set_label(os.str());
  return g;
}

Garden build_modular_ford_garden(double R) { return Garden::modular_ford(R); }

Garden build_halfplane_periodic(double h, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("separation must be positive");
  if (!(h > 0.0 && h < std::exp(-0.5 * R))) {
    throw std::invalid_argument("halfplane-periodic needs 0 < h < e^{-R/2}");
  }
  Garden g = Garden::from_balls(Model::HalfPlane, {Horoball::half_plane(0.0, h)}, R, true);
  std::ostringstream os;
  os << "halfplane-periodic:h=" << h << ",R=" << R;
  g.set_label(os.str());
  return g;
}

}  // namespace hgarden
