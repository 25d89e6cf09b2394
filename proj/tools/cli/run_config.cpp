#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <ostream>
#include <sstream>

#ifndef HGARDEN_VERSION
#define HGARDEN_VERSION "0.0.0"
#endif

namespace hgarden::cli {

using nlohmann::json;

namespace {

const char* const kUndigested[] = {"out", "dump_paths", "workers"};

bool undigested(const std::string& k) {
  for (const char* u : kUndigested) {
    if (k == u) return true;
  }
  return false;
}

void layer(json& base, const json& over, const char* source) {
  if (over.is_null()) return;
  if (!over.is_object()) throw UsageError(std::string(source) + ": expected a JSON object");
  for (const auto& [k, v] : over.items()) {
    if (!base.contains(k) && !undigested(k)) throw UsageError(std::string(source) + ": unknown key '" + k + "'");
    if (k == "tol") {
      if (!v.is_object()) throw UsageError(std::string(source) + ": tol must be an object");
      for (const auto& [tk, tv] : v.items()) base["tol"][tk] = tv;
    } else {
      base[k] = v;
    }
  }
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
  if (used != s.size()) throw UsageError("bad number '" + s + "' in " + what);
  return v;
}

std::map<std::string, std::string> kv_params(const std::string& body, const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("bad map parameter '" + item + "' in '" + spec + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

}  // namespace

double RunConfig::tolerance(const std::string& key) const {
  auto it = tol.find(key);
  if (it == tol.end()) throw std::logic_error("no tolerance named " + key);
  return it->second;
}

json RunConfig::canonical() const {
  json j;
  j["command"] = command;
  j["target"] = target;
  j["garden"] = garden;
  j["seed"] = seed;
  j["n"] = n;
  j["t_max"] = t_max;
  j["dt"] = dt;
  j["p"] = p;
  j["r_list"] = r_list;
  j["map"] = map;
  j["format"] = format;
  j["tol"] = tol;
  return j;
}

std::string RunConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical().dump())));
  return buf;
}

json default_config(const std::string& command, const std::string& target) {
  json j = {
      {"garden", "none"},
      {"seed", 0},
      {"n", 0},
      {"t_max", 0.0},
      {"dt", 0.05},
      {"p", json::array()},
      {"r_list", json::array()},
      {"map", "power:a=1"},
      {"format", "csv"},
      {"tol",
       {{"ks", 0.02}, {"censor", 0.01}, {"se", 3.0}, {"quad", 1e-6}, {"sym", 1e-12}, {"mass", 1e-6},
        {"closed", 1e-8}}},
  };
  if (command == "verify") {
    if (target == "excursion") {
      j["n"] = 10000;
      j["t_max"] = 60.0;
    } else if (target == "occupation") {
      j["n"] = 10000;
      j["t_max"] = 20.0;
    } else if (target == "all") {
      j["n"] = 10000;  // t_max 0: each suite keeps its own horizon
    }
  } else if (command == "beta") {
    if (target == "fk") {
      j["n"] = 2000;
      j["t_max"] = 40.0;
      j["p"] = {0.05, 0.1};
    } else if (target == "conformal-brownian") {
      j["n"] = 20000;
      j["t_max"] = 12.0;
      j["p"] = {0.5, 1.5, 2.0};
    } else {
      j["p"] = {0.5, 1.5, 2.0};
    }
  }
  return j;
}

RunConfig resolve_config(const std::string& command, const std::string& target, const json& config_file,
                         const json& flags) {
  json j = default_config(command, target);
  layer(j, config_file, "config file");
  layer(j, flags, "flags");
  RunConfig c;
  c.command = command;
  c.target = target;
  try {
    c.garden = j.at("garden").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.n = j.at("n").get<std::uint64_t>();
    c.t_max = j.at("t_max").get<double>();
    c.dt = j.at("dt").get<double>();
    c.p = j.at("p").get<std::vector<double>>();
    c.r_list = j.at("r_list").get<std::vector<double>>();
    c.map = j.at("map").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.tol = j.at("tol").get<std::map<std::string, double>>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("dump_paths")) c.dump_paths = j["dump_paths"].get<std::string>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad configuration value: ") + e.what());
  }
  if (c.format != "csv" && c.format != "json") throw UsageError("format must be csv or json");
  if (!(c.dt > 0.0)) throw UsageError("dt must be positive");
  if (c.t_max < 0.0) throw UsageError("t-max must be >= 0");
  return c;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty entry in list '" + s + "'");
    v.push_back(parse_double(item, "list '" + s + "'"));
  }
  if (v.empty()) throw UsageError("empty list");
  return v;
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> m;
  for (const std::string& it : items) {
    auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--tol expects name=value, got '" + it + "'");
    m[it.substr(0, eq)] = parse_double(it.substr(eq + 1), "--tol " + it);
  }
  return m;
}

TestMap parse_map_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  auto kv = colon == std::string::npos ? std::map<std::string, std::string>{} : kv_params(spec.substr(colon + 1), spec);
  auto take = [&](const char* key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    double v = parse_double(it->second, "map '" + spec + "'");
    kv.erase(it);
    return v;
  };
  double phi = take("phi", 0.0);
  TestMap f;
  if (head == "identity") {
    f = TestMap::identity();
  } else if (head == "power") {
    if (!kv.count("a")) throw UsageError("power map needs a=");
    double a = take("a", 0.0), b = take("b", 0.0);
    f = TestMap::power_singularity(cplx(a, b), phi);
  } else if (head == "koebe") {
    f = TestMap::koebe(phi);
  } else if (head == "bloch") {
    if (!kv.count("k")) throw UsageError("bloch map needs k=");
    f = TestMap::synthetic_bloch(take("k", 0.0), phi);
  } else {
    throw UsageError("unknown map family '" + head + "'");
  }
  if (!kv.empty()) throw UsageError("unknown map parameter '" + kv.begin()->first + "' in '" + spec + "'");
  return f;
}

std::string wall_clock() {
  std::time_t now = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    long long v = std::strtoll(sde, &end, 10);
    if (end != sde && *end == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_line(const RunConfig& cfg) {
  std::ostringstream s;
  s << "# hgarden " << HGARDEN_VERSION << " config=" << cfg.digest() << " seed=" << cfg.seed
    << " wall_clock=" << wall_clock();
  return s.str();
}

json manifest_json(const RunConfig& cfg) {
  return {{"tool", "hgarden"},
          {"version", HGARDEN_VERSION},
          {"config_digest", cfg.digest()},
          {"seed", cfg.seed},
          {"wall_clock", wall_clock()},
          {"config", cfg.canonical()}};
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Table::Block& Table::block(const std::string& label) {
  blocks.push_back({label, {}});
  return blocks.back();
}

void Table::add(std::vector<json> row) {
  if (blocks.empty()) block();
  blocks.back().rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return fmt_num(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

json json_cell(const json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return fmt_num(v.get<double>());
  return v;
}

}  // namespace

void emit(std::ostream& out, const RunConfig& cfg, const Table& t) {
  if (cfg.format == "json") {
    json doc;
    doc["manifest"] = manifest_json(cfg);
    doc["columns"] = t.columns;
    doc["blocks"] = json::array();
    for (const auto& b : t.blocks) {
      json jb;
      jb["label"] = b.label;
      jb["rows"] = json::array();
      for (const auto& r : b.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < r.size() && i < t.columns.size(); ++i) o[t.columns[i]] = json_cell(r[i]);
        jb["rows"].push_back(o);
      }
      doc["blocks"].push_back(jb);
    }
    out << doc.dump(2) << "\n";
    return;
  }
  out << manifest_line(cfg) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& b : t.blocks) {
    if (!b.label.empty()) out << "# " << b.label << "\n";
    for (const auto& r : b.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
      out << "\n";
    }
  }
}

}  // namespace hgarden::cli
