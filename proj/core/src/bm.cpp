#include "hgarden/bm.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "hgarden/parallel.hpp"
#include "hgarden/rng.hpp"

namespace hgarden {

namespace {

constexpr int kPosBits = 24;
constexpr std::uint32_t kPosEnd = 1u << kPosBits;
constexpr std::uint32_t kSubUnit = kPosEnd / 8;
constexpr std::uint32_t kMaxNode = 1u << 27;

struct Node {
  double t, x, ly, s;
  std::uint32_t pos;
};

class StepState {
 public:
  StepState(const PathStream& st, const StepPolicy& pol, double h)
      : st_(st), h_(h), sub_(h / 8.0), h_min_(pol.dt * pol.refine_factor), thr_(pol.split_threshold),
        near_min_(h * pol.near_depth_fraction) {}

  void generate(std::uint64_t step, double t0, double t1, double x0, double ly0) {
    step_ = step;
    t0_ = t0;
    t1_ = t1;
    ly_[0] = ly0;
    double sh = std::sqrt(sub_);
    CounterEngine eng(st_, step, PathStream::Grid);
    boost::random::normal_distribution<double> normal;
    for (int k = 0; k < 8; ++k) ly_[k + 1] = ly_[k] + sh * normal(eng) - 0.5 * sub_;
    cum_[0] = 0.0;
    double e = std::exp(2.0 * ly_[0]);
    for (int k = 0; k < 8; ++k) {
      double e2 = std::exp(2.0 * ly_[k + 1]);
      cum_[k + 1] = cum_[k] + 0.5 * sub_ * (e + e2);
      e = e2;
    }
    x0_ = x0;
    double zx = normal(eng);
    x1_ = x0 + std::sqrt(cum_[8]) * zx;
  }

  Node start(double s) const { return Node{t0_, x0_, ly_[0], s, 0}; }
  Node end(double s) const { return Node{t1_, x1_, ly_[8], s, kPosEnd}; }
  double end_x() const { return x1_; }
  double end_ly() const { return ly_[8]; }

  Node mid(std::uint32_t node, const Node& a, const Node& b) const {
    Node m;
    m.pos = a.pos + (b.pos - a.pos) / 2;
    m.t = t0_ + (t1_ - t0_) * (static_cast<double>(m.pos) / kPosEnd);
    auto [z1, z2] = st_.normals(step_, PathStream::Bridge, node);
    double v1, v2;
    if (m.pos % kSubUnit == 0) {
      std::uint32_t ia = a.pos / kSubUnit, im = m.pos / kSubUnit, ib = b.pos / kSubUnit;
      m.ly = ly_[im];
      v1 = cum_[im] - cum_[ia];
      v2 = cum_[ib] - cum_[im];
    } else {
      double h = b.t - a.t;
      m.ly = 0.5 * (a.ly + b.ly) + std::sqrt(0.25 * h) * z1;
      double ea = std::exp(2.0 * a.ly), em = std::exp(2.0 * m.ly), eb = std::exp(2.0 * b.ly);
      v1 = 0.25 * h * (ea + em);
      v2 = 0.25 * h * (em + eb);
    }
    double v = v1 + v2;
    if (v > 0.0) {
      m.x = a.x + (b.x - a.x) * (v1 / v) + std::sqrt(v1 * v2 / v) * z2;
    } else {
      m.x = 0.5 * (a.x + b.x);
    }
    return m;
  }

  template <class Leaf>
  void refine(const Region& R, double cap, const Node& a, const Node& b, std::uint32_t node, Leaf& leaf) const {
    double h = b.t - a.t;
    bool cross = (a.s < 0.0) != (b.s < 0.0);
    bool near = h > near_min_ && 2.0 * std::abs(a.s) * std::abs(b.s) < thr_ * h;
    if ((!cross && !near) || h <= h_min_ * (1.0 + 1e-9) || node >= kMaxNode || b.pos - a.pos < 2) {
      leaf(a, b);
      return;
    }
    Node m = mid(node, a, b);
    m.s = R.signed_distance_hp(m.x, std::exp(m.ly), cap);
    refine(R, cap, a, m, 2 * node, leaf);
    refine(R, cap, m, b, 2 * node + 1, leaf);
  }

 private:
  const PathStream& st_;
  double h_, sub_, h_min_, thr_, near_min_;
  std::uint64_t step_ = 0;
  double t0_ = 0.0, t1_ = 0.0, x0_ = 0.0, x1_ = 0.0;
  double ly_[9] = {};
  double cum_[9] = {};
};

double distance_cap(const StepPolicy& pol) { return std::max(3.0, 4.0 * std::sqrt(pol.dt)); }

cplx start_hp(const Point& x0) { return x0.model == Model::HalfPlane ? x0.coord : cayley(x0.coord); }

void check_policy(const StepPolicy& pol) {
  if (!(pol.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (pol.substeps != 8) throw std::invalid_argument("the stepping scheme uses 8 sub-steps");
  if (!(pol.refine_factor > 0.0 && pol.refine_factor < 1.0)) throw std::invalid_argument("refine_factor must lie in (0,1)");
}

// Drives one path; on_step(state, step_index) is called once per grid step, after which
// the state advances. In the modular chart the state is reduced to the fundamental domain.
template <class OnStep>
void walk(cplx w0, double T, const StepPolicy& pol, const PathStream& st, bool chart, OnStep&& on_step) {
  check_policy(pol);
  if (!(w0.imag() > 0.0)) throw std::invalid_argument("start point must lie in the upper half-plane");
  std::size_t n = step_count(T, pol.dt);
  if (n == 0) return;
  double h = T / static_cast<double>(n);
  StepState S(st, pol, h);
  double x = w0.real(), ly = std::log(w0.imag());
  if (chart) {
    cplx r = reduce_modular(cplx(x, w0.imag()));
    x = r.real();
    ly = std::log(r.imag());
  }
  for (std::size_t i = 0; i < n; ++i) {
    S.generate(i, h * static_cast<double>(i), h * static_cast<double>(i + 1), x, ly);
    on_step(S, i);
    x = S.end_x();
    ly = S.end_ly();
    if (chart && (std::abs(x) > 0.5 || x * x + std::exp(2.0 * ly) < 1.0)) {
      cplx r = reduce_modular(cplx(x, std::exp(ly)));
      x = r.real();
      ly = std::log(r.imag());
    }
  }
}

std::vector<std::size_t> checkpoint_steps(const std::vector<double>& checkpoints, double T, double dt) {
  std::size_t n = step_count(T, dt);
  double h = n ? T / static_cast<double>(n) : 0.0;
  std::vector<std::size_t> ks;
  for (double c : checkpoints) {
    if (c < 0.0 || c > T * (1.0 + 1e-12)) throw std::invalid_argument("checkpoint outside [0, T]");
    if (c == 0.0) {
      ks.push_back(0);
      continue;
    }
    double k = std::round(c / h);
    if (std::abs(k * h - c) > 1e-9 * std::max(1.0, c)) {
      throw std::invalid_argument("checkpoint not on the step grid; choose T and dt accordingly");
    }
    ks.push_back(static_cast<std::size_t>(k));
  }
  return ks;
}

struct LeafInside {
  double total = 0.0;
  void operator()(const Node& a, const Node& b) {
    double h = b.t - a.t;
    if (a.s < 0.0 && b.s < 0.0) {
      total += h;
    } else if (a.s < 0.0 || b.s < 0.0) {
      double in = a.s < 0.0 ? -a.s : -b.s;
      total += h * in / (std::abs(a.s) + std::abs(b.s));
    }
  }
};

struct LeafLastExit {
  double last = 0.0;
  bool entered = false;
  void operator()(const Node& a, const Node& b) {
    if (b.s < 0.0) {
      last = b.t;
      entered = true;
    } else if (a.s < 0.0) {
      entered = true;
      last = a.t + (b.t - a.t) * (-a.s) / (std::abs(a.s) + std::abs(b.s));
    }
  }
};

Point to_model(Model m, double x, double ly) {
  cplx w(x, std::exp(ly));
  return m == Model::HalfPlane ? Point::half_plane(w) : Point::disk(cayley_inverse(w));
}

LastExit last_exit_run(cplx w0, double T, const StepPolicy& policy, const PathStream& st, const Region& R) {
  // the last crossing may sit in any short excursion: refine same-side intervals down to h_min
  StepPolicy pol = policy;
  pol.near_depth_fraction = 0.0;
  double cap = std::max(distance_cap(pol), 6.0);
  double s = R.signed_distance_hp(w0.real(), w0.imag(), cap);
  LeafLastExit leaf;
  if (s < 0.0) leaf.entered = true;
  walk(w0, T, pol, st, false, [&](const StepState& S, std::size_t) {
    Node a = S.start(s);
    double s1 = R.signed_distance_hp(S.end_x(), std::exp(S.end_ly()), cap);
    Node b = S.end(s1);
    S.refine(R, cap, a, b, 1, leaf);
    s = s1;
  });
  LastExit out;
  out.entered = leaf.entered;
  out.time = leaf.last;
  // conservative: re-entry cannot be excluded within distance 5 of the ball
  out.censored = s < 5.0;
  return out;
}

}  // namespace

AnnulusRegion::AnnulusRegion(const Point& center, double rho_in, double rho_out)
    : c_(start_hp(center)), rho_in_(rho_in), rho_out_(rho_out) {
  if (!(rho_in >= 0.0 && rho_out > rho_in)) throw std::invalid_argument("annulus radii must satisfy 0 <= in < out");
  double sh = std::sinh(0.5 * (rho_out + 3.0));
  far_u_ = sh * sh;
}

double AnnulusRegion::signed_distance_hp(double x, double y, double cap) const {
  double dx = x - c_.real(), dy = y - c_.imag();
  double u = (dx * dx + dy * dy) / (4.0 * y * c_.imag());  // sinh^2(d/2)
  if (cap <= 3.0 && u > far_u_) return cap;
  double d = 2.0 * std::asinh(std::sqrt(u));
  double s = std::max(rho_in_ - d, d - rho_out_);
  return std::clamp(s, -cap, cap);
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

PathSample sample_path(const Point& x0, double T, const StepPolicy& policy, std::uint64_t seed,
                       std::uint64_t path_id, const Garden* refine_in) {
  if (T < 0.0) throw std::invalid_argument("T must be nonnegative");
  if (T > 0.0 && policy.dt > T) throw std::invalid_argument("dt must not exceed T");
  if (refine_in && !refine_in->is_empty() && refine_in->model() != x0.model) {
    throw ModelMismatch("sample_path: garden and start point in different models");
  }
  PathSample p;
  p.model = x0.model;
  p.x0 = x0;
  p.T = T;
  p.seed = seed;
  p.path_id = path_id;
  p.policy = policy;
  cplx w0 = start_hp(x0);
  p.times.push_back(0.0);
  p.positions.push_back(x0);
  PathStream st(seed, path_id);
  std::unique_ptr<GardenRegion> region;
  if (refine_in && !refine_in->is_empty()) region = std::make_unique<GardenRegion>(*refine_in);
  double cap = distance_cap(policy);
  double s = region ? region->signed_distance_hp(w0.real(), w0.imag(), cap) : 1.0;
  auto push = [&](const Node& n) {
    p.times.push_back(n.t);
    p.positions.push_back(to_model(p.model, n.x, n.ly));
  };
  walk(w0, T, policy, st, false, [&](const StepState& S, std::size_t) {
    if (!region) {
      push(S.end(0.0));
      return;
    }
    double s1 = region->signed_distance_hp(S.end_x(), std::exp(S.end_ly()), cap);
    auto leaf = [&](const Node&, const Node& b) { push(b); };
    S.refine(*region, cap, S.start(s), S.end(s1), 1, leaf);
    s = s1;
  });
  return p;
}

double occupation_time(const PathSample& path, const Garden& G) {
  if (G.is_empty()) return 0.0;
  if (G.model() != path.model) throw ModelMismatch("occupation_time: path and garden in different models");
  GardenRegion R(G);
  cplx w0 = start_hp(path.x0);
  double cap = distance_cap(path.policy);
  double s = R.signed_distance_hp(w0.real(), w0.imag(), cap);
  LeafInside leaf;
  PathStream st(path.seed, path.path_id);
  walk(w0, path.T, path.policy, st, false, [&](const StepState& S, std::size_t) {
    double s1 = R.signed_distance_hp(S.end_x(), std::exp(S.end_ly()), cap);
    S.refine(R, cap, S.start(s), S.end(s1), 1, leaf);
    s = s1;
  });
  return leaf.total;
}

LastExit last_exit_time(const PathSample& path, const Horoball& B) {
  if (B.model != path.model) throw ModelMismatch("last_exit_time: path and horoball in different models");
  Garden g = Garden::from_balls(B.model, {B}, kInf);
  GardenRegion R(g);
  PathStream st(path.seed, path.path_id);
  return last_exit_run(start_hp(path.x0), path.T, path.policy, st, R);
}

std::vector<std::vector<double>> simulate_occupation(const Point& x0, const std::vector<const Region*>& regions,
                                                     const McConfig& cfg, const std::vector<double>& checkpoints) {
  check_policy(cfg.policy);
  std::vector<std::size_t> ks = checkpoints.empty() ? std::vector<std::size_t>{step_count(cfg.T, cfg.policy.dt)}
                                                    : checkpoint_steps(checkpoints, cfg.T, cfg.policy.dt);
  std::size_t K = ks.size(), nr = regions.size();
  bool chart = !regions.empty();
  for (const Region* r : regions) chart = chart && r->modular_invariant();
  cplx w0 = start_hp(x0);
  double cap = distance_cap(cfg.policy);
  std::vector<std::vector<double>> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    PathStream st(cfg.seed, cfg.first_path + i);
    std::vector<double> row(nr * K, 0.0);
    std::vector<double> s(nr);
    std::vector<LeafInside> acc(nr);
    cplx start = chart ? reduce_modular(w0) : w0;
    for (std::size_t r = 0; r < nr; ++r) s[r] = regions[r]->signed_distance_hp(start.real(), start.imag(), cap);
    auto record = [&](std::size_t steps_done) {
      for (std::size_t k = 0; k < K; ++k) {
        if (ks[k] != steps_done) continue;
        for (std::size_t r = 0; r < nr; ++r) row[r * K + k] = acc[r].total;
      }
    };
    record(0);
    walk(w0, cfg.T, cfg.policy, st, chart, [&](const StepState& S, std::size_t step) {
      double y1 = std::exp(S.end_ly());
      for (std::size_t r = 0; r < nr; ++r) {
        double s1 = regions[r]->signed_distance_hp(S.end_x(), y1, cap);
        S.refine(*regions[r], cap, S.start(s[r]), S.end(s1), 1, acc[r]);
        s[r] = s1;
      }
      record(step + 1);
    });
    out[i] = std::move(row);
  });
  return out;
}

Estimate occupation_estimate(const Point& x0, const Garden& G, const McConfig& cfg) {
  if (!G.is_empty() && G.model() != x0.model) throw ModelMismatch("occupation_estimate: mixed models");
  GardenRegion R(G);
  auto rows = simulate_occupation(x0, {&R}, cfg);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[0]);
  Estimate e = mean_estimate(v);
  e.t = cfg.T;
  e.seed = cfg.seed;
  return e;
}

std::vector<double> LastExitRun::uncensored_times() const {
  std::vector<double> t;
  for (const LastExit& e : exits) {
    if (!e.censored) t.push_back(e.time);
  }
  return t;
}

LastExitRun simulate_last_exit(const Point& x0, const Horoball& B, const McConfig& cfg) {
  if (B.model != x0.model) throw ModelMismatch("simulate_last_exit: mixed models");
  Garden g = Garden::from_balls(B.model, {B}, kInf);
  GardenRegion R(g);
  cplx w0 = start_hp(x0);
  LastExitRun run;
  run.exits.resize(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    PathStream st(cfg.seed, cfg.first_path + i);
    run.exits[i] = last_exit_run(w0, cfg.T, cfg.policy, st, R);
  });
  std::size_t c = 0;
  for (const LastExit& e : run.exits) c += e.censored ? 1 : 0;
  run.censoring_rate = cfg.n_paths ? static_cast<double>(c) / static_cast<double>(cfg.n_paths) : 0.0;
  return run;
}

std::vector<std::vector<cplx>> simulate_endpoints(const Point& x0, const McConfig& cfg,
                                                  const std::vector<double>& checkpoints) {
  check_policy(cfg.policy);
  std::vector<std::size_t> ks = checkpoint_steps(checkpoints, cfg.T, cfg.policy.dt);
  cplx w0 = start_hp(x0);
  std::vector<std::vector<cplx>> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    PathStream st(cfg.seed, cfg.first_path + i);
    std::vector<cplx> row(ks.size(), w0);
    walk(w0, cfg.T, cfg.policy, st, false, [&](const StepState& S, std::size_t step) {
      for (std::size_t k = 0; k < ks.size(); ++k) {
        if (ks[k] == step + 1) row[k] = cplx(S.end_x(), std::exp(S.end_ly()));
      }
    });
    out[i] = std::move(row);
  });
  return out;
}

SpeedReport displacement_speed(const Point& x0, double T, std::size_t N, const McConfig& cfg) {
  if (!(T >= 20.0)) throw std::invalid_argument("displacement_speed needs T >= 20");
  McConfig c = cfg;
  c.T = T;
  c.n_paths = N;
  cplx w0 = start_hp(x0);
  // T/2 must sit on the grid: use an even number of steps
  std::size_t n = step_count(T, c.policy.dt);
  if (n % 2 == 1) c.policy.dt = T / static_cast<double>(n + 1);
  auto ends = simulate_endpoints(x0, c, {0.5 * T, T});
  auto dist = [&](cplx w) { return 2.0 * std::asinh(std::abs(w - w0) / (2.0 * std::sqrt(w.imag() * w0.imag()))); };
  std::vector<double> v, a;
  v.reserve(N);
  a.reserve(N);
  for (const auto& row : ends) {
    double d_half = dist(row[0]), d_full = dist(row[1]);
    v.push_back(d_full / T);
    a.push_back((d_full - d_half) / (0.5 * T));
  }
  SpeedReport rep;
  rep.speed = mean_estimate(v);
  rep.speed.t = T;
  rep.speed.seed = cfg.seed;
  rep.asymptotic_speed = mean_estimate(a);
  rep.asymptotic_speed.t = T;
  rep.asymptotic_speed.seed = cfg.seed;
  rep.q05 = quantile(v, 0.05);
  rep.q95 = quantile(v, 0.95);
  return rep;
}

void write_paths_csv(std::ostream& out, const std::vector<PathSample>& paths, const Garden* G) {
  out << "path_id,t,re,im,in_garden\n";
  char buf[160];
  for (const PathSample& p : paths) {
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      int in = (G && !G->is_empty() && G->contains(p.positions[i])) ? 1 : 0;
      std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%d\n", static_cast<unsigned long long>(p.path_id),
                    p.times[i], p.positions[i].coord.real(), p.positions[i].coord.imag(), in);
      out << buf;
    }
  }
}

}  // namespace hgarden
