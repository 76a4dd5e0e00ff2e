#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/medium.hpp"
#include "biphoton/temporal.hpp"

namespace cli {

/// Bad or inconsistent configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written (exit status 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dim { Frequency, FrequencySq, Time, Dimensionless, Word };

// One "key = value" line after unit conversion. Frequencies end up in
// Gamma-units, squared frequencies in Gamma^2, times in ns.
struct Entry {
  std::string key;
  int line = 0;
  Dim dim = Dim::Word;
  std::vector<double> numbers;
  std::string word;
  std::string text;  ///< value as written
};

class Config {
 public:
  std::string source;
  std::map<std::string, Entry> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  int line(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> number(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  std::string word(const std::string& key, const std::string& fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  /// "line N, field 'key': " prefix for diagnostics.
  std::string where(const std::string& key) const;
};

Config parse_config(std::istream& in, const std::string& source);
Config load_config(const std::string& path);

/// Everything the subcommands share, resolved from a Config.
struct RunConfig {
  Config raw;
  biphoton::MediumParams params;
  std::vector<biphoton::MediumParams> sweep;  ///< zipped *_list entries, or just params
  std::optional<double> grid_span;
  std::optional<std::size_t> grid_points;
  biphoton::FilterSpec filter;
  biphoton::PathlengthMode pathlength = biphoton::PathlengthMode::BiphotonQuarter;
  biphoton::PumpMode pump = biphoton::PumpMode::ExactPumpDenominator;
  bool sinc = true;

  /// Every effective setting, defaults included, in internal units.
  nlohmann::ordered_json resolved() const;
};

RunConfig resolve(Config raw);

/// Rethrows a library error as ConfigError, pointing at the config line
/// that set the field named in the message when there is one.
[[noreturn]] void rethrow_with_line(const Config& cfg, const std::exception& e);

/// Exposed for tests: value with unit -> internal unit.
double convert_unit(double value, const std::string& unit, Dim dim);

}  // namespace cli
