#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hgarden/bm.hpp"
#include "hgarden/feynman_kac.hpp"
#include "hgarden/garden.hpp"
#include "hgarden/kernels.hpp"
#include "hgarden/quadrature.hpp"
#include "hgarden/spectra.hpp"
#include "run_config.hpp"

namespace hgarden::cli {

using nlohmann::json;

namespace {

struct Flags {
  std::string garden, p, r_list, out, format, config, map, dump_paths;
  std::uint64_t seed = 0, n = 0;
  double t_max = 0.0, dt = 0.0;
  unsigned workers = 0;
  std::vector<std::string> tol;
  std::vector<CLI::Option*> opts;
};

void add_common(CLI::App* app, Flags& f) {
  auto& o = f.opts;
  o.push_back(app->add_option("--garden", f.garden, "garden spec: none | ford:R=,Q= | ford:R= | halfplane-periodic:h=,R= | file"));
  o.push_back(app->add_option("--seed", f.seed, "master seed"));
  o.push_back(app->add_option("--n", f.n, "number of paths"));
  o.push_back(app->add_option("--t-max", f.t_max, "time horizon"));
  o.push_back(app->add_option("--dt", f.dt, "reported step length"));
  o.push_back(app->add_option("--p", f.p, "comma-separated p list"));
  o.push_back(app->add_option("--r-list", f.r_list, "comma-separated R list (one output block per R)"));
  o.push_back(app->add_option("--out", f.out, "output file (default stdout)"));
  o.push_back(app->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"})));
  o.push_back(app->add_option("--workers", f.workers, "worker threads, 0 = all cores"));
  o.push_back(app->add_option("--tol", f.tol, "tolerance override name=value")->allow_extra_args(false));
  o.push_back(app->add_option("--config", f.config, "JSON config file"));
  o.push_back(app->add_option("--map", f.map, "test map: identity | power:a=,b=,phi= | koebe[:phi=] | bloch:k=,phi="));
  o.push_back(app->add_option("--dump-paths", f.dump_paths, "beta fk: write the first paths to this CSV"));
}

bool given(const Flags& f, const char* name) {
  for (CLI::Option* o : f.opts) {
    if (o->get_name() == name) return o->count() > 0;
  }
  return false;
}

json flags_json(const Flags& f) {
  json j = json::object();
  if (given(f, "--garden")) j["garden"] = f.garden;
  if (given(f, "--seed")) j["seed"] = f.seed;
  if (given(f, "--n")) j["n"] = f.n;
  if (given(f, "--t-max")) j["t_max"] = f.t_max;
  if (given(f, "--dt")) j["dt"] = f.dt;
  if (given(f, "--p")) j["p"] = parse_list(f.p);
  if (given(f, "--r-list")) j["r_list"] = parse_list(f.r_list);
  if (given(f, "--out")) j["out"] = f.out;
  if (given(f, "--format")) j["format"] = f.format;
  if (given(f, "--workers")) j["workers"] = f.workers;
  if (given(f, "--tol")) j["tol"] = parse_tolerances(f.tol);
  if (given(f, "--map")) j["map"] = f.map;
  if (given(f, "--dump-paths")) j["dump_paths"] = f.dump_paths;
  return j;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

McConfig mc_config(const RunConfig& c, double T) {
  McConfig m;
  m.seed = c.seed;
  m.n_paths = static_cast<std::size_t>(c.n);
  m.T = T;
  m.policy.dt = c.dt;
  m.workers = c.workers;
  return m;
}

std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

// Replaces the R= value of a builtin spec.
std::string with_separation(const std::string& spec, double R) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  if (colon == std::string::npos || (head != "ford" && head != "halfplane-periodic")) {
    throw UsageError("--r-list needs a builtin ford or halfplane-periodic garden, got '" + spec + "'");
  }
  std::string body = spec.substr(colon + 1);
  std::stringstream ss(body);
  std::string item, rebuilt;
  bool found = false;
  while (std::getline(ss, item, ',')) {
    if (item.rfind("R=", 0) == 0) {
      item = "R=" + fmt_num(R);
      found = true;
    }
    rebuilt += (rebuilt.empty() ? "" : ",") + item;
  }
  if (!found) throw UsageError("garden spec '" + spec + "' has no R= to sweep");
  return head + ":" + rebuilt;
}

// ---------------------------------------------------------------- garden

int cmd_garden(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Garden G = parse_garden_spec(c.target);
  double R = G.separation();
  // Ford balls sit at distance exactly R; the 1e-9 slack absorbs rounding only
  SeparationReport rep = std::isfinite(R) ? verify_separation(G, R * (1.0 - 1e-9)) : SeparationReport{};
  std::ofstream file;
  std::ostream* gout = &out;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw std::runtime_error("cannot write '" + c.out + "'");
    gout = &file;
  }
  *gout << manifest_line(c) << "\n";
  write_garden(*gout, G);
  Table t;
  t.columns = {"label", "balls", "separation", "min_pair_distance", "verdict"};
  json balls = G.kind() == Garden::Kind::ModularFord ? json("inf") : json(G.balls().size());
  t.add({G.label(), balls, R, rep.min_distance, verdict(rep.ok)});
  emit(c.out.empty() ? err : out, c, t);
  if (!rep.ok && rep.pair) {
    err << "separation violated by balls " << rep.pair->first << " and " << rep.pair->second << " (shift "
        << rep.shift << ")\n";
  }
  return rep.ok ? kOk : kValidation;
}

// ---------------------------------------------------------------- verify

struct Suite {
  Table table;
  bool ok = true;

  void row(const std::string& suite, const std::string& check, json t, json param, double value, json reference,
           json se, json margin, bool pass) {
    ok = ok && pass;
    table.add({suite, check, std::move(t), std::move(param), value, std::move(reference), std::move(se),
               std::move(margin), verdict(pass)});
  }
};

void suite_kernels(const RunConfig& c, Suite& s) {
  double sym = c.tolerance("sym"), mass = c.tolerance("mass"), quad = c.tolerance("quad");
  double closed = c.tolerance("closed");
  Point x = Point::disk({0.3, 0.1}), y = Point::disk({-0.2, 0.5});
  for (double t : {0.5, 2.0, 10.0}) {
    double a = green_partial(t, x, y), b = green_partial(t, y, x);
    double m = sym * std::max(1.0, std::abs(a)) - std::abs(a - b);
    s.row("kernels", "symmetry", t, hyp_distance(x, y), a, b, nullptr, m, m >= 0.0);
  }
  for (double t : {0.5, 2.0, 10.0}) {
    double rho_max = 0.5 * t + 12.0 * std::sqrt(t) + 10.0;
    double v = heat_kernel_mass(t, rho_max);
    double m = mass - std::abs(v - 1.0);
    s.row("kernels", "heat_mass", t, rho_max, v, 1.0, nullptr, m, m >= 0.0);
  }
  for (double rho : {0.5, 1.0, 2.0, 4.0}) {
    double v = green_partial_rho(400.0, rho), ref = green_inf_rho(rho);
    double m = quad - std::abs(v / ref - 1.0);
    s.row("kernels", "green_limit", 400.0, rho, v, ref, nullptr, m, m >= 0.0);
  }
  for (double D : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    double v = occupation_integral_depth(D, kInf), ref = 2.0 * std::exp(-D);
    double m = closed - std::abs(v / ref - 1.0);
    s.row("kernels", "occupation_closed_form", "inf", D, v, ref, nullptr, m, m >= 0.0);
  }
}

void suite_excursion(const RunConfig& c, double T, Suite& s) {
  double ks_tol = c.tolerance("ks"), censor_tol = c.tolerance("censor");
  LastExitRun run = simulate_last_exit(Point::half_plane({0.0, 1.0}), Horoball::half_plane_infinity(1.0),
                                       mc_config(c, T));
  std::vector<double> xs = run.uncensored_times();
  double d = xs.empty() ? 1.0 : ks_statistic(xs, [](double x) { return gamma_cdf(x, 0.5, 0.125); });
  s.row("excursion", "ks_gamma(1/2,1/8)", T, static_cast<double>(xs.size()), d, 0.0,
        xs.empty() ? json(nullptr) : json(ks_pvalue(d, xs.size())), ks_tol - d, d < ks_tol);
  s.row("excursion", "censoring_rate", T, static_cast<double>(run.exits.size()), run.censoring_rate, 0.0, nullptr,
        censor_tol - run.censoring_rate, run.censoring_rate < censor_tol);
}

void suite_occupation(const RunConfig& c, double T, Suite& s) {
  double k = c.tolerance("se");
  Point x0 = Point::half_plane({0.0, 1.0});
  Garden top = Garden::from_balls(Model::HalfPlane, {Horoball::half_plane_infinity(1.0)}, kInf, false);
  Garden deep = Garden::from_balls(Model::HalfPlane, {Horoball::half_plane_infinity(std::exp(1.0))}, kInf, false);
  GardenRegion r_top(top), r_deep(deep);
  const double shells[][2] = {{0.25, 0.5}, {0.5, 1.0}, {1.0, 2.0}, {2.0, 3.0}, {3.0, 4.0}};
  std::vector<AnnulusRegion> ann;
  for (const auto& sh : shells) ann.emplace_back(x0, sh[0], sh[1]);
  std::vector<const Region*> regions{&r_top, &r_deep};
  for (const auto& a : ann) regions.push_back(&a);
  auto occ = simulate_occupation(x0, regions, mc_config(c, T));
  auto column = [&](std::size_t r) {
    std::vector<double> v;
    v.reserve(occ.size());
    for (const auto& row : occ) v.push_back(row[r]);
    return mean_estimate(v);
  };
  auto check = [&](const std::string& name, json param, std::size_t r, double ref) {
    Estimate e = column(r);
    double m = k * e.std_error - std::abs(e.value - ref);
    s.row("occupation", name, T, std::move(param), e.value, ref, e.std_error, m, m >= 0.0);
  };
  check("horoball_depth", 0.0, 0, occupation_integral_depth(0.0, T));
  check("horoball_depth", 1.0, 1, occupation_integral_depth(1.0, T));
  for (std::size_t i = 0; i < ann.size(); ++i) {
    std::ostringstream p;
    p << fmt_num(shells[i][0]) << "-" << fmt_num(shells[i][1]);
    check("annulus", p.str(), 2 + i,
          annulus_occupation(std::tanh(0.5 * shells[i][0]), std::tanh(0.5 * shells[i][1]), T));
  }
}

void suite_monotonicity(const RunConfig& c, Suite& s) {
  double tol = c.tolerance("quad");
  std::vector<double> r_grid;
  for (int i = 0; i < 25; ++i) r_grid.push_back(0.02 + 0.04 * i);
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    MonotonicityReport rep = check_ratio_monotone_annuli(t, r_grid, tol);
    for (std::size_t i = 0; i < rep.params.size(); ++i) {
      if (i == 0) {
        s.table.add({"monotonicity", "annulus_ratio", t, rep.params[i], rep.ratios[i], nullptr, nullptr, nullptr,
                     "n/a"});
        continue;
      }
      double m = rep.margins[i - 1];
      s.row("monotonicity", "annulus_ratio", t, rep.params[i], rep.ratios[i], rep.ratios[i - 1], nullptr, m,
            m > tol);
    }
  }
  for (double t : {0.5, 2.0, 10.0}) {
    for (double h : {0.5, 1.0, 1.5}) {
      for (double shrink : {0.25, 0.5, 0.75}) {
        MonotonicityReport rep = check_ratio_monotone_crescents(t, h, shrink, tol);
        double m = rep.margins.front();
        s.row("monotonicity", "crescent_ratio:shrink=" + fmt_num(shrink), t, h, rep.ratios.front(), rep.ratios.back(),
              nullptr, m, m > tol);
      }
    }
  }
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const std::string& suite = c.target;
  bool all = suite == "all";
  if (!all && suite != "kernels" && suite != "excursion" && suite != "occupation" && suite != "monotonicity") {
    throw UsageError("unknown suite '" + suite + "'");
  }
  auto horizon = [&](const char* name) {
    if (c.t_max > 0.0) return c.t_max;
    return default_config("verify", name).at("t_max").get<double>();
  };
  Suite s;
  s.table.columns = {"suite", "check", "t", "param", "value", "reference", "se", "margin", "verdict"};
  if (all || suite == "kernels") {
    s.table.block("kernels");
    suite_kernels(c, s);
  }
  if (all || suite == "excursion") {
    s.table.block("excursion");
    suite_excursion(c, horizon("excursion"), s);
  }
  if (all || suite == "occupation") {
    s.table.block("occupation");
    suite_occupation(c, horizon("occupation"), s);
  }
  if (all || suite == "monotonicity") {
    s.table.block("monotonicity");
    suite_monotonicity(c, s);
  }
  emit(out, c, s.table);
  return s.ok ? kOk : kValidation;
}

// ---------------------------------------------------------------- beta

std::vector<double> even_grid(double t_max, int k) {
  if (!(t_max > 0.0)) throw UsageError("t-max must be positive");
  std::vector<double> g;
  for (int i = 1; i <= k; ++i) g.push_back(t_max * i / k);
  return g;
}

void report_notes(const std::vector<SpectrumFit>& fits, std::ostream& err) {
  for (const SpectrumFit& f : fits) {
    if (f.warning) err << "warning: p=" << fmt_num(f.p) << ": " << f.note << "\n";
  }
}

int beta_fk(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.p.empty()) throw UsageError("beta fk needs --p");
  std::vector<double> grid = even_grid(c.t_max, 8);
  std::vector<std::string> specs;
  if (c.r_list.empty()) {
    specs.push_back(c.garden);
  } else {
    for (double R : c.r_list) specs.push_back(with_separation(c.garden, R));
  }
  Table t;
  t.columns = {"p", "t", "log_estimate", "se", "beta_hat", "ci_lo", "ci_hi", "R", "garden_id", "seed"};
  McConfig mc = mc_config(c, c.t_max);
  for (std::size_t b = 0; b < specs.size(); ++b) {
    auto G = std::make_shared<const Garden>(parse_garden_spec(specs[b]));
    double R = G->separation();
    t.block(c.r_list.empty() ? "" : "R=" + fmt_num(c.r_list[b]));
    auto fits = lyapunov_exponents(Potential::garden_indicator(G), c.p, grid, mc);
    report_notes(fits, err);
    for (const SpectrumFit& f : fits) {
      t.add({f.p, grid.back(), f.log_values.back(), f.log_se.back(), f.beta_hat, f.ci_lo, f.ci_hi,
             std::isfinite(R) ? json(R) : json("inf"), G->label(), c.seed});
    }
    if (b == 0 && !c.dump_paths.empty()) {
      std::ofstream dump(c.dump_paths);
      if (!dump) throw std::runtime_error("cannot write '" + c.dump_paths + "'");
      std::vector<PathSample> paths;
      std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(c.n), 16);
      Point x0 = default_origin(G->model());
      for (std::size_t i = 0; i < m; ++i) paths.push_back(sample_path(x0, c.t_max, mc.policy, c.seed, i, G.get()));
      write_paths_csv(dump, paths, G.get());
    }
  }
  emit(out, c, t);
  return kOk;
}

int beta_conformal(const RunConfig& c, bool brownian, std::ostream& out, std::ostream& err) {
  if (c.p.empty()) throw UsageError("beta " + c.target + " needs --p");
  if (!c.r_list.empty()) throw UsageError("--r-list applies to beta fk only");
  TestMap f = parse_map_spec(c.map);
  Table t;
  t.columns = {"p", "beta_hat", "ci_lo", "ci_hi", "method"};
  t.block(f.name());
  std::vector<SpectrumFit> fits;
  if (brownian) {
    std::vector<cplx> ps(c.p.begin(), c.p.end());
    fits = brownian_spectra(f, ps, even_grid(c.t_max, 12), mc_config(c, c.t_max));
  } else {
    std::vector<double> r = dyadic_r_grid(8, 24);
    for (double p : c.p) fits.push_back(fit_beta(f, p, r));
  }
  report_notes(fits, err);
  for (const SpectrumFit& s : fits) {
    t.add({s.p, s.beta_hat, s.ci_lo, s.ci_hi, brownian ? "brownian" : "classical"});
  }
  emit(out, c, t);
  return kOk;
}

int cmd_beta(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.target == "fk") return beta_fk(c, out, err);
  if (c.target == "conformal-brownian") return beta_conformal(c, true, out, err);
  if (c.target == "conformal-classical") return beta_conformal(c, false, out, err);
  throw UsageError("unknown beta mode '" + c.target + "'");
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "garden") return cmd_garden(c, out, err);
  std::ofstream file;
  std::ostream* o = &out;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw std::runtime_error("cannot write '" + c.out + "'");
    o = &file;
  }
  int rc = c.command == "verify" ? cmd_verify(c, *o) : cmd_beta(c, *o, err);
  o->flush();
  return rc;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hgarden: Brownian motion in horoball gardens"};
  app.set_version_flag("--version", HGARDEN_VERSION);
  app.require_subcommand(1);
  std::string target;
  Flags fg, fv, fb;
  CLI::App* g = app.add_subcommand("garden", "build a garden and check its separation");
  g->add_option("spec", target, "garden spec")->required();
  add_common(g, fg);
  CLI::App* v = app.add_subcommand("verify", "run a verification suite");
  v->add_option("suite", target, "kernels | excursion | occupation | monotonicity | all")
      ->required()
      ->check(CLI::IsMember({"kernels", "excursion", "occupation", "monotonicity", "all"}));
  add_common(v, fv);
  CLI::App* b = app.add_subcommand("beta", "estimate a growth spectrum");
  b->add_option("mode", target, "fk | conformal-brownian | conformal-classical")
      ->required()
      ->check(CLI::IsMember({"fk", "conformal-brownian", "conformal-classical"}));
  add_common(b, fb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Flags& f = sub == g ? fg : sub == v ? fv : fb;
  try {
    json file = f.config.empty() ? json() : read_config_file(f.config);
    RunConfig c = resolve_config(sub->get_name(), target, file, flags_json(f));
    return dispatch(c, out, err);
  } catch (const GardenSpecError& e) {
    err << "error: " << e.what() << " (token '" << e.token() << "')\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const QuadratureError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace hgarden::cli
