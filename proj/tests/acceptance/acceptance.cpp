// Acceptance runner: one PASS/FAIL line per criterion. With arguments, runs only the
// listed criteria (1-9); exit status is nonzero when any selected criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "hgarden/bm.hpp"
#include "hgarden/bounds.hpp"
#include "hgarden/dynkin.hpp"
#include "hgarden/feynman_kac.hpp"
#include "hgarden/kernels.hpp"
#include "hgarden/spectra.hpp"
#include "hgarden/stats.hpp"
#include "hgarden/test_maps.hpp"

using namespace hgarden;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

McConfig config(std::uint64_t seed, std::size_t n, double T) {
  McConfig c;
  c.seed = seed;
  c.n_paths = n;
  c.T = T;
  return c;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& v) {
  std::vector<double> y;
  for (double a : v) y.push_back(std::log(a));
  return linear_fit(x, y).slope;
}

const Point kI = Point::half_plane({0.0, 1.0});

Outcome green_law() {
  const double shells[][2] = {{0.25, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 3.0}, {3.0, 4.0}};
  std::vector<std::unique_ptr<AnnulusRegion>> owned;
  std::vector<const Region*> regions;
  for (const auto& s : shells) {
    owned.push_back(std::make_unique<AnnulusRegion>(kI, s[0], s[1]));
    regions.push_back(owned.back().get());
  }
  auto occ = simulate_occupation(kI, regions, config(101, 100000, 200.0));
  Outcome o{true, ""};
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::vector<double> v;
    for (const auto& row : occ) v.push_back(row[r]);
    Estimate e = mean_estimate(v);
    double ref = annulus_occupation(std::tanh(0.5 * shells[r][0]), std::tanh(0.5 * shells[r][1]), kInf);
    double z = (e.value - ref) / e.std_error;
    o.pass = o.pass && std::abs(z) <= 3.0;
    o.detail += " z" + std::to_string(r + 1) + "=" + num(z);
  }
  return o;
}

Outcome excursion_law() {
  LastExitRun run = simulate_last_exit(kI, Horoball::half_plane_infinity(1.0), config(202, 100200, 60.0));
  std::vector<double> xs = run.uncensored_times();
  double ks = ks_statistic(xs, [](double x) { return gamma_cdf(x, 0.5, 0.125); });
  bool ok = ks < 0.02 && run.censoring_rate < 0.01 && xs.size() >= 100000;
  return {ok, " KS=" + num(ks) + " censored=" + num(run.censoring_rate) + " uncensored=" + std::to_string(xs.size())};
}

Outcome occupation_scaling() {
  Horoball B = Horoball::half_plane_infinity(1.0);
  Garden G = Garden::from_balls(Model::HalfPlane, {B}, kInf);
  double T = 80.0;
  std::vector<double> x, mc;
  Outcome o{true, ""};
  for (double R : {2.0, 4.0, 6.0, 8.0}) {
    // the boundary of B* = inflate(B, R/2) is the horocycle Im = e^{-R/2}
    Point x0 = Point::half_plane({0.0, std::exp(-0.5 * R)});
    Estimate e = occupation_estimate(x0, G, config(300 + static_cast<std::uint64_t>(R), 100000, T));
    double ref = occupation_integral_depth(0.5 * R, T);
    double z = (e.value - ref) / e.std_error;
    o.pass = o.pass && std::abs(z) <= 3.0;
    o.detail += " R=" + num(R) + ":z=" + num(z);
    x.push_back(0.5 * R);
    mc.push_back(e.value);
  }
  double s = log_slope(x, mc);
  o.pass = o.pass && s >= -1.1 && s <= -0.9;
  o.detail = " slope=" + num(s) + o.detail;
  return o;
}

Outcome monotonicity() {
  const char* argv[] = {"hgarden", "verify", "monotonicity", "--format", "json"};
  std::ostringstream out, err;
  int rc = cli::run_cli(5, argv, out, err);
  if (rc != 0) return {false, " verify exit " + std::to_string(rc) + " " + err.str()};
  json j = json::parse(out.str());
  std::size_t checked = 0;
  double worst = kInf;
  bool ok = true;
  for (const auto& b : j["blocks"]) {
    for (const auto& row : b["rows"]) {
      if (row["verdict"] == "n/a") continue;
      ++checked;
      double m = row["margin"].get<double>();
      worst = std::min(worst, m);
      ok = ok && row["verdict"] == "pass" && m > 1e-6;
    }
  }
  return {ok && checked > 0, " checks=" + std::to_string(checked) + " min_margin=" + num(worst)};
}

Outcome lyapunov_scaling() {
  const std::vector<double> grid{5, 10, 15, 20, 25, 30, 35, 40};
  const std::vector<double> ps{0.05, 0.1};
  std::vector<double> ratio;
  Outcome o{true, ""};
  for (double R : {2.0, 4.0, 6.0}) {
    auto G = std::make_shared<const Garden>(build_modular_ford_garden(R));
    auto fits = lyapunov_exponents(Potential::garden_indicator(G), ps, grid,
                                   config(500 + static_cast<std::uint64_t>(R), 100000, 40.0));
    double h0 = 0.5 * (fits[0].ci_hi - fits[0].ci_lo), h1 = 0.5 * (fits[1].ci_hi - fits[1].ci_lo);
    // beta(0) = 0 exactly, so convexity on {0, p1, 2 p1} is beta(p1) <= beta(2 p1) / 2
    bool increasing = fits[0].beta_hat - h0 > 0.0 && fits[1].beta_hat + h1 >= fits[0].beta_hat - h0;
    bool convex = fits[0].beta_hat - h0 <= 0.5 * (fits[1].beta_hat + h1);
    o.pass = o.pass && increasing && convex;
    for (const SpectrumFit& f : fits) ratio.push_back(f.beta_hat / (f.p * f.p * std::exp(-0.5 * R)));
    o.detail += " R=" + num(R) + ":beta=" + num(fits[0].beta_hat) + "/" + num(fits[1].beta_hat);
  }
  double lo = *std::min_element(ratio.begin(), ratio.end()), hi = *std::max_element(ratio.begin(), ratio.end());
  o.pass = o.pass && lo > 0.0 && hi / lo < 4.0;
  o.detail = " ratio_span=" + num(hi / lo) + o.detail;
  return o;
}

Outcome nonconcentration() {
  Horoball B = Horoball::disk(1.0, 0.2);
  std::vector<double> x, q;
  for (double R : {2.0, 4.0, 6.0, 8.0}) {
    x.push_back(0.5 * R);
    q.push_back(nonconcentration_ratio(B, R, horoball_inflate(B, 0.5 * R).top(), kInf));
  }
  double s = log_slope(x, q);
  return {s >= -1.2 && s <= -0.8, " slope=" + num(s)};
}

Outcome spectrum_oracle() {
  Outcome o{true, ""};
  std::vector<double> r = dyadic_r_grid(8, 24);
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double p : {0.3, 0.8, 1.25, 1.5, 2.0, 3.0}) {
      double s = a * p;
      if (std::abs(s - 1.0) < 0.1) continue;  // logarithmic case
      double beta = fit_beta(TestMap::power_singularity(a), p, r).beta_hat;
      worst = std::max(worst, std::abs(beta - std::max(0.0, s - 1.0)));
    }
  }
  o.pass = worst <= 0.02;
  o.detail = " max_fit_error=" + num(worst);
  TestMap f = TestMap::power_singularity(1.0);
  std::vector<double> grid;
  for (int i = 1; i <= 12; ++i) grid.push_back(i);
  std::vector<cplx> ps{1.5, 2.0, 3.0};
  auto fits = brownian_spectra(f, ps, grid, config(701, 20000, 12.0));
  double speed = displacement_speed(Point::disk(0.0), 40.0, 4000, config(702, 0, 40.0)).asymptotic_speed.value;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    double beta = fit_beta(f, ps[i], r).beta_hat;
    double half = 0.5 * (fits[i].ci_hi - fits[i].ci_lo);
    bool ok = beta * speed <= fits[i].beta_hat + 3.0 * half;
    o.pass = o.pass && ok;
    o.detail += " p=" + num(ps[i].real()) + ":" + num(beta * speed) + "<=" + num(fits[i].beta_hat);
  }
  o.detail += " speed=" + num(speed);
  return o;
}

Outcome bound_pipeline() {
  std::vector<double> x, fq, bq;
  for (double R : {2.0, 4.0, 6.0}) {
    x.push_back(0.5 * R);
    fq.push_back(freezing_check(0.002, 1.0, Horoball::disk(1.0, 1e-3), R).quotient);
    bq.push_back(bp_quotient(build_modular_ford_garden(R), 0.002, 1.0, 1e-3).quotient);
  }
  double sf = log_slope(x, fq), sb = log_slope(x, bq);
  DynkinInput in;
  in.k = 0.3;
  in.z = Point::disk(1.0 - 1e-3);
  double scale = std::pow(1e-3, 0.7);
  double prev = kInf;
  bool monotone = true;
  for (double L : {10.0, 25.0, 50.0, 100.0, 200.0}) {
    in.L = L;
    double gap = dynkin_bound(in, DynkinVariant::Corollary).value / scale - 1.0;
    monotone = monotone && (gap < prev || std::abs(gap) < 1e-13);  // below that the gap is rounding
    prev = gap;
  }
  bool ok = sf >= -1.3 && sf <= -0.7 && sb >= -1.3 && sb <= -0.7 && monotone && prev < 1e-12;
  return {ok, " freezing_slope=" + num(sf) + " bp_slope=" + num(sb) + " dynkin_rel_gap(L=200)=" + num(prev)};
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  out += "\nexit=" + std::to_string(st);
  return out;
}

Outcome determinism() {
  const std::vector<std::string> runs{
      "garden ford:R=4,Q=10",
      "verify kernels",
      "verify excursion --n 400 --t-max 20",
      "verify occupation --n 300 --t-max 5",
      "beta fk --garden ford:R=2 --p 0.05,0.1 --n 300 --t-max 8",
      "beta fk --garden ford:R=4,Q=4 --r-list 2,4 --p 0.1 --n 100 --t-max 4 --format json",
      "beta conformal-brownian --map koebe --p 1.5,2 --n 400 --t-max 6",
      "beta conformal-classical --map power:a=2 --p 0.5,1.5,2",
  };
  Outcome o{true, ""};
  std::size_t same = 0;
  for (const std::string& args : runs) {
    std::string ref;
    bool ok = true;
    for (const char* w : {"1", "4", "16"}) {
      std::string out = capture("SOURCE_DATE_EPOCH=1700000000 '" HGARDEN_CLI_PATH "' " + args + " --workers " + w + " 2>&1");
      if (ref.empty()) ref = out;
      ok = ok && out == ref;
    }
    same += ok;
    if (!ok) o.detail += " differs: [" + args + "]";
    o.pass = o.pass && ok;
  }
  o.detail = " identical=" + std::to_string(same) + "/" + std::to_string(runs.size()) + o.detail;
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"green function law", 300, green_law},
      {"excursion law", 600, excursion_law},
      {"horoball occupation scaling", 900, occupation_scaling},
      {"monotonicity suites", 120, monotonicity},
      {"Feynman-Kac Lyapunov scaling", 1800, lyapunov_scaling},
      {"non-concentration", 120, nonconcentration},
      {"spectrum oracle", 600, spectrum_oracle},
      {"bound pipeline", 300, bound_pipeline},
      {"determinism", 120, determinism},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  if (pick.empty()) {
    for (int i = 1; i <= 9; ++i) pick.push_back(i);
  }
  int failed = 0;
  for (int id : pick) {
    if (id < 1 || id > 9) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const Criterion& c = all[id - 1];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string(" exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_s;
    bool ok = o.pass && in_time;
    failed += !ok;
    std::cout << "criterion " << id << " (" << c.name << "): " << (ok ? "PASS" : "FAIL") << o.detail
              << " runtime=" << num(secs) << "s/" << num(c.budget_s) << "s" << (in_time ? "" : " over budget")
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
