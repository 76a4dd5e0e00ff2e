#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace cli {

namespace {

struct KeySpec {
  Dim dim;
  bool list;
};

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"omega_c", {Dim::Frequency, false}},
      {"omega_p", {Dim::Frequency, false}},
      {"delta_p", {Dim::Frequency, false}},
      {"gamma", {Dim::Frequency, false}},
      {"gamma_doppler", {Dim::Frequency, false}},
      {"alpha_s", {Dim::Dimensionless, false}},
      {"alpha_as", {Dim::Dimensionless, false}},
      {"omega_c_list", {Dim::Frequency, true}},
      {"gamma_list", {Dim::Frequency, true}},
      {"alpha_s_list", {Dim::Dimensionless, true}},
      {"alpha_s_axis", {Dim::Dimensionless, true}},
      {"omega_c_sq_axis", {Dim::FrequencySq, true}},
      {"gamma_axis", {Dim::Frequency, true}},
      {"grid_span", {Dim::Frequency, false}},
      {"grid_points", {Dim::Dimensionless, false}},
      {"filter_fwhm", {Dim::Frequency, false}},  // or "none"
      {"time_bin", {Dim::Time, false}},
      {"tau_min", {Dim::Time, false}},
      {"tau_max", {Dim::Time, false}},
      {"baseline_window", {Dim::Dimensionless, false}},
      {"power_ratios", {Dim::Dimensionless, true}},
      {"omega_c0_guess", {Dim::Frequency, false}},
      {"pathlength", {Dim::Word, false}},
      {"pump", {Dim::Word, false}},
      {"sinc", {Dim::Word, false}},
      {"spectrum", {Dim::Word, false}},
      {"compare", {Dim::Word, false}},
      {"map_kind", {Dim::Word, false}},
      {"fit_kind", {Dim::Word, false}},
      {"value_column", {Dim::Word, false}},
      {"output", {Dim::Word, false}},
      {"format", {Dim::Word, false}},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::Frequency: return "frequency (Gamma, kHz, MHz, GHz)";
    case Dim::FrequencySq: return "squared frequency (Gamma^2, MHz^2)";
    case Dim::Time: return "time (ns, us, 1/Gamma)";
    case Dim::Dimensionless: return "dimensionless";
    case Dim::Word: return "word";
  }
  return "?";
}

std::string at(int line, const std::string& key) {
  return "line " + std::to_string(line) + ", field '" + key + "': ";
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) return std::nullopt;
  return v;
}

}  // namespace

double convert_unit(double value, const std::string& unit, Dim dim) {
  namespace u = biphoton::units;
  switch (dim) {
    case Dim::Frequency:
      // MHz etc. are cyclic: X MHz means 2 pi x X MHz, and Gamma = 2 pi x 6 MHz.
      if (unit == "Gamma") return value;
      if (unit == "kHz") return u::mhz_to_gamma(value * 1e-3);
      if (unit == "MHz") return u::mhz_to_gamma(value);
      if (unit == "GHz") return u::mhz_to_gamma(value * 1e3);
      break;
    case Dim::FrequencySq:
      if (unit == "Gamma^2") return value;
      if (unit == "MHz^2") return value * u::mhz_to_gamma(1.0) * u::mhz_to_gamma(1.0);
      break;
    case Dim::Time:
      if (unit == "ns") return value;
      if (unit == "us") return value * 1e3;
      if (unit == "1/Gamma") return value * u::kNsPerInverseGamma;
      break;
    case Dim::Dimensionless:
      if (unit.empty() || unit == "1") return value;
      break;
    case Dim::Word:
      break;
  }
  throw ConfigError("unit '" + unit + "' is not a " + dim_name(dim) + " unit");
}

int Config::line(const std::string& key) const {
  const auto it = entries.find(key);
  return it == entries.end() ? 0 : it->second.line;
}

std::string Config::where(const std::string& key) const {
  const int l = line(key);
  if (l == 0) return "field '" + key + "': ";
  return at(l, key);
}

std::optional<double> Config::number(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return std::nullopt;
  return it->second.numbers.at(0);
}

double Config::number(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

std::vector<double> Config::list(const std::string& key) const {
  const auto it = entries.find(key);
  return it == entries.end() ? std::vector<double>{} : it->second.numbers;
}

std::string Config::word(const std::string& key, const std::string& fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second.word;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto w = word(key, "");
  if (w == "true" || w == "on" || w == "yes") return true;
  if (w == "false" || w == "off" || w == "no") return false;
  throw ConfigError(where(key) + "expected true/false, got '" + w + "'");
}

Config parse_config(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source = source;
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(n) + ": expected 'key = value unit'");
    }
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.line = n;
    e.text = trim(line.substr(eq + 1));
    const auto spec = key_table().find(e.key);
    if (spec == key_table().end()) throw ConfigError(at(n, e.key) + "unknown key");
    if (cfg.has(e.key)) {
      throw ConfigError(at(n, e.key) + "duplicate, first set on line " +
                        std::to_string(cfg.line(e.key)));
    }
    if (e.text.empty()) throw ConfigError(at(n, e.key) + "missing value");
    e.dim = spec->second.dim;

    if (e.dim == Dim::Word || (e.key == "filter_fwhm" && e.text == "none")) {
      e.word = e.text;
      cfg.entries.emplace(e.key, std::move(e));
      continue;
    }

    // Items are "number [unit]"; a unit on the last item covers the bare ones before it.
    std::vector<std::pair<double, std::string>> items;
    std::stringstream ss(e.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::istringstream toks(trim(item));
      std::string num, unit, extra;
      toks >> num >> unit >> extra;
      if (num.empty()) throw ConfigError(at(n, e.key) + "empty list item");
      if (!extra.empty()) throw ConfigError(at(n, e.key) + "unexpected '" + extra + "'");
      const auto v = to_number(num);
      if (!v) throw ConfigError(at(n, e.key) + "'" + num + "' is not a number");
      items.emplace_back(*v, unit);
    }
    if (!spec->second.list && items.size() != 1) {
      throw ConfigError(at(n, e.key) + "expects a single value");
    }
    const std::string trailing = items.back().second;
    for (auto& [v, unit] : items) {
      if (unit.empty()) unit = trailing;
      if (unit.empty() && e.dim != Dim::Dimensionless) {
        throw ConfigError(at(n, e.key) + "missing unit, expected " + dim_name(e.dim));
      }
      try {
        e.numbers.push_back(convert_unit(v, unit, e.dim));
      } catch (const ConfigError& err) {
        throw ConfigError(at(n, e.key) + err.what());
      }
      if (!std::isfinite(e.numbers.back())) throw ConfigError(at(n, e.key) + "value is not finite");
    }
    cfg.entries.emplace(e.key, std::move(e));
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

// Library validation names the field; point the user at the line that set it.
[[noreturn]] void rethrow_with_line(const Config& cfg, const std::exception& e) {
  const std::string msg = e.what();
  const auto a = msg.find('\'');
  const auto b = a == std::string::npos ? a : msg.find('\'', a + 1);
  if (b != std::string::npos) {
    const std::string field = msg.substr(a + 1, b - a - 1);
    for (const auto& key : {field, field + "_list"}) {
      if (cfg.has(key)) throw ConfigError(cfg.where(key) + msg);
    }
  }
  throw ConfigError(msg);
}

RunConfig resolve(Config raw) {
  using namespace biphoton;
  RunConfig rc;
  auto& p = rc.params;
  p.omega_c = raw.number("omega_c", p.omega_c);
  p.omega_p = raw.number("omega_p", p.omega_p);
  p.delta_p = raw.number("delta_p", p.delta_p);
  p.gamma = raw.number("gamma", p.gamma);
  p.gamma_doppler = raw.number("gamma_doppler", p.gamma_doppler);
  p.alpha_s = raw.number("alpha_s", p.alpha_s);
  p.alpha_as = raw.number("alpha_as", p.alpha_as);

  const std::string pl = raw.word("pathlength", "biphoton_quarter");
  if (pl == "biphoton_quarter") {
    rc.pathlength = PathlengthMode::BiphotonQuarter;
  } else if (pl == "classical_probe_half") {
    rc.pathlength = PathlengthMode::ClassicalProbeHalf;
  } else {
    throw ConfigError(raw.where("pathlength") + "expected biphoton_quarter or classical_probe_half");
  }
  const std::string pm = raw.word("pump", "exact");
  if (pm == "exact") {
    rc.pump = PumpMode::ExactPumpDenominator;
  } else if (pm == "constant_ratio") {
    rc.pump = PumpMode::ConstantPumpRatio;
  } else {
    throw ConfigError(raw.where("pump") + "expected exact or constant_ratio");
  }
  rc.sinc = raw.flag("sinc", true);

  if (raw.has("filter_fwhm") && raw.word("filter_fwhm", "") != "none") {
    rc.filter = FilterSpec::etalon(*raw.number("filter_fwhm"));
  }
  try {
    rc.filter.validate();
  } catch (const DomainError& e) {
    rethrow_with_line(raw, e);
  }

  if (raw.has("grid_span")) {
    rc.grid_span = *raw.number("grid_span");
    if (!(*rc.grid_span > 0.0)) throw ConfigError(raw.where("grid_span") + "must be > 0");
  }
  if (raw.has("grid_points")) {
    const double v = *raw.number("grid_points");
    if (!(v >= 2.0) || v != std::floor(v) || v > 1 << 26) {
      throw ConfigError(raw.where("grid_points") + "must be an integer >= 2");
    }
    rc.grid_points = static_cast<std::size_t>(v);
  }
  if (rc.grid_span.has_value() != rc.grid_points.has_value()) {
    throw ConfigError(raw.where(rc.grid_span ? "grid_span" : "grid_points") +
                      "grid_span and grid_points must be given together");
  }

  // Zipped sweep: item i takes the i-th value of every *_list that is present.
  std::size_t count = 0;
  std::string first;
  for (const char* key : {"omega_c_list", "gamma_list", "alpha_s_list"}) {
    if (!raw.has(key)) continue;
    const auto n = raw.list(key).size();
    if (count == 0) {
      count = n;
      first = key;
    } else if (n != count) {
      throw ConfigError(raw.where(key) + "has " + std::to_string(n) + " values but " + first +
                        " has " + std::to_string(count));
    }
  }
  if (count == 0) {
    rc.sweep.push_back(p);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      MediumParams q = p;
      if (raw.has("omega_c_list")) q.omega_c = raw.list("omega_c_list")[i];
      if (raw.has("gamma_list")) q.gamma = raw.list("gamma_list")[i];
      if (raw.has("alpha_s_list")) q.alpha_s = raw.list("alpha_s_list")[i];
      rc.sweep.push_back(q);
    }
  }
  try {
    p.validate();
    for (const auto& q : rc.sweep) q.validate();
  } catch (const DomainError& e) {
    rethrow_with_line(raw, e);
  }
  rc.raw = std::move(raw);
  return rc;
}

nlohmann::ordered_json RunConfig::resolved() const {
  using nlohmann::ordered_json;
  auto params_json = [](const biphoton::MediumParams& q) {
    return ordered_json{{"omega_c", q.omega_c},   {"omega_p", q.omega_p},
                        {"delta_p", q.delta_p},   {"gamma", q.gamma},
                        {"gamma_doppler", q.gamma_doppler}, {"alpha_s", q.alpha_s},
                        {"alpha_as", q.alpha_as}};
  };
  ordered_json j;
  j["source"] = raw.source;
  j["units"] = "frequencies in Gamma = 2 pi x 6 MHz, squared frequencies in Gamma^2, times in ns";
  j["params"] = params_json(params);
  j["sweep"] = ordered_json::array();
  for (const auto& q : sweep) j["sweep"].push_back(params_json(q));
  j["pathlength"] = biphoton::to_string(pathlength);
  j["pump"] = biphoton::to_string(pump);
  j["sinc"] = sinc;
  j["filter"] = {{"kind", biphoton::to_string(filter.kind)}, {"fwhm", filter.fwhm}};
  if (grid_span) {
    j["grid"] = {{"span", *grid_span}, {"points", *grid_points}};
  } else {
    j["grid"] = "default";
  }
  ordered_json entries = ordered_json::object();
  for (const auto& [key, e] : raw.entries) {
    ordered_json v;
    if (!e.word.empty()) {
      v = e.word;
    } else if (e.numbers.size() == 1 && key.find("_list") == std::string::npos &&
               key.find("_axis") == std::string::npos && key != "power_ratios") {
      v = e.numbers[0];
    } else {
      v = e.numbers;
    }
    entries[key] = {{"line", e.line}, {"as_written", e.text}, {"value", v}};
  }
  j["entries"] = entries;
  return j;
}

}  // namespace cli
