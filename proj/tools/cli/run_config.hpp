#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgarden/test_maps.hpp"

namespace hgarden::cli {

enum ExitCode { kOk = 0, kUsage = 2, kValidation = 3, kNumeric = 4 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Resolved configuration of one run. Precedence: flags > --config file > defaults.
struct RunConfig {
  std::string command;  // garden | verify | beta
  std::string target;   // garden spec, suite or beta mode
  std::string garden = "none";
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  double t_max = 0.0;
  double dt = 0.05;
  std::vector<double> p;
  std::vector<double> r_list;
  std::string map = "power:a=1";
  std::string format = "csv";
  std::map<std::string, double> tol;
  // not part of the digest
  std::string out;
  std::string dump_paths;
  unsigned workers = 0;

  double tolerance(const std::string& key) const;

  // Canonical form: sorted keys, workers and output paths excluded.
  nlohmann::json canonical() const;
  std::string digest() const;
};

// Defaults for a command/target pair; the single source of truth for defaults.
nlohmann::json default_config(const std::string& command, const std::string& target);

// Layers j over the defaults; unknown keys are usage errors.
RunConfig resolve_config(const std::string& command, const std::string& target, const nlohmann::json& config_file,
                         const nlohmann::json& flags);

std::uint64_t fnv1a64(std::string_view s);
std::vector<double> parse_list(const std::string& s);
std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items);

// identity | power:a=<re>[,b=<im>][,phi=] | koebe[:phi=] | bloch:k=<k>[,phi=]
TestMap parse_map_spec(const std::string& spec);

// "# hgarden <version> config=<digest> seed=<seed> wall_clock=<UTC>"; the clock honours
// SOURCE_DATE_EPOCH.
std::string manifest_line(const RunConfig& cfg);
nlohmann::json manifest_json(const RunConfig& cfg);
std::string wall_clock();

std::string fmt_num(double v);

struct Table {
  struct Block {
    std::string label;
    std::vector<std::vector<nlohmann::json>> rows;
  };
  std::vector<std::string> columns;
  std::vector<Block> blocks;

  Block& block(const std::string& label = "");
  void add(std::vector<nlohmann::json> row);  // into the last block
};

void emit(std::ostream& out, const RunConfig& cfg, const Table& t);

}  // namespace hgarden::cli
