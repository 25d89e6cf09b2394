#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "hgarden/garden.hpp"

namespace hgarden {

namespace {

double parse_number(const std::string& s, const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw GardenSpecError("not a number: '" + s + "'", token);
  }
  if (used != s.size()) throw GardenSpecError("trailing characters in number: '" + s + "'", token);
  return v;
}

std::map<std::string, std::string> parse_params(const std::string& body, const std::string& token) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw GardenSpecError("expected key=value, got '" + item + "'", token);
    std::string key = item.substr(0, eq);
    if (kv.count(key)) throw GardenSpecError("duplicate key '" + key + "'", token);
    kv[key] = item.substr(eq + 1);
  }
  return kv;
}

void require_keys(const std::map<std::string, std::string>& kv, std::initializer_list<const char*> allowed,
                  const std::string& token) {
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw GardenSpecError("unknown key '" + k + "'", token);
  }
}

}  // namespace

Garden parse_garden_spec(const std::string& spec) {
  if (spec == "none") return Garden::empty(Model::HalfPlane);
  auto colon = spec.find(':');
  std::string head = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "ford") {
    auto kv = parse_params(body, spec);
    require_keys(kv, {"R", "Q"}, spec);
    if (!kv.count("R")) throw GardenSpecError("ford garden needs R", spec);
    double R = parse_number(kv["R"], spec);
    if (!(R > 0.0)) throw GardenSpecError("R must be positive", spec);
    if (!kv.count("Q")) {
      try {
        return build_modular_ford_garden(R);
      } catch (const std::invalid_argument& e) {
        throw GardenSpecError(e.what(), spec);
      }
    }
    double Q = parse_number(kv["Q"], spec);
    if (!(Q >= 1.0) || Q != std::floor(Q) || Q > 1e6) throw GardenSpecError("Q must be an integer >= 1", spec);
    return build_ford_garden(R, static_cast<int>(Q));
  }
  if (head == "halfplane-periodic") {
    auto kv = parse_params(body, spec);
    require_keys(kv, {"h", "R"}, spec);
    if (!kv.count("h") || !kv.count("R")) throw GardenSpecError("halfplane-periodic needs h and R", spec);
    try {
      return build_halfplane_periodic(parse_number(kv["h"], spec), parse_number(kv["R"], spec));
    } catch (const GardenSpecError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw GardenSpecError(e.what(), spec);
    }
  }
  std::ifstream in(spec);
  if (!in) throw GardenSpecError("unknown garden specifier and no such file", spec);
  return read_garden(in);
}

Garden read_garden(std::istream& in) {
  double separation = kInf;
  bool periodic = false, modular = false, have_model = false;
  Model model = Model::HalfPlane;
  std::string label;
  std::vector<Horoball> balls;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string where = "line " + std::to_string(lineno);
    auto next = [&]() {
      std::string v;
      if (!(ls >> v)) throw GardenSpecError("missing field", where);
      return v;
    };
    if (key == "separation") {
      separation = parse_number(next(), where);
    } else if (key == "periodic") {
      periodic = parse_number(next(), where) != 0.0;
    } else if (key == "modular") {
      modular = parse_number(next(), where) != 0.0;
    } else if (key == "label") {
      std::getline(ls >> std::ws, label);
    } else if (key == "disk" || key == "halfplane") {
      Model m = key == "disk" ? Model::Disk : Model::HalfPlane;
      if (have_model && m != model) throw GardenSpecError("mixed models in garden file", where);
      model = m;
      have_model = true;
      std::string base = next();
      double size = parse_number(next(), where);
      try {
        if (m == Model::Disk) {
          balls.push_back(Horoball::disk_angle(parse_number(base, where), size));
        } else if (base == "inf") {
          balls.push_back(Horoball::half_plane_infinity(size));
        } else {
          balls.push_back(Horoball::half_plane(parse_number(base, where), size));
        }
      } catch (const GardenSpecError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw GardenSpecError(e.what(), where);
      }
    } else {
      throw GardenSpecError("unknown record '" + key + "'", where);
    }
  }
  Garden g;
  try {
    if (modular) {
      g = Garden::modular_ford(separation);
    } else if (balls.empty()) {
      g = Garden::empty(model);
    } else {
      g = Garden::from_balls(model, std::move(balls), separation, periodic);
    }
  } catch (const std::invalid_argument& e) {
    throw GardenSpecError(e.what(), "garden file");
  }
  if (!label.empty()) g.set_label(label);
  return g;
}

void write_garden(std::ostream& out, const Garden& G) {
  auto flags = out.flags();
  auto prec = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# hgarden garden\n";
  out << "label " << G.label() << "\n";
  out << "separation " << G.separation() << "\n";
  out << "periodic " << (G.periodic() ? 1 : 0) << "\n";
  if (G.kind() == Garden::Kind::ModularFord) out << "modular 1\n";
  for (const Horoball& b : G.balls()) {
    if (b.model == Model::Disk) {
      out << "disk " << std::arg(b.base) << " " << b.size << "\n";
    } else if (b.at_infinity) {
      out << "halfplane inf " << b.size << "\n";
    } else {
      out << "halfplane " << b.base.real() << " " << b.size << "\n";
    }
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace hgarden
