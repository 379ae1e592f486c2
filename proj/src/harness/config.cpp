#include "dropsim/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dropsim/errors.hpp"

namespace dropsim {
namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

double parse_number(const std::string& v, int line) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not a number");
  return out;
}

std::uint64_t parse_unsigned(const std::string& v, int line) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not an unsigned integer");
  return out;
}

}  // namespace

double ScenarioConfig::control(const std::string& key) const {
  const auto it = controls.find(key);
  if (it == controls.end()) throw ConfigError("scenario control '" + key + "' is not defined");
  return it->second;
}

ScenarioConfig parse_config(std::string_view text, const std::string& scenario,
                            const std::map<std::string, double>& defaults,
                            const MediumParams& base) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.controls = defaults;
  cfg.medium = base;
  double c = cfg.medium.c, omega0 = cfg.medium.omega0, g = cfg.medium.g;
  double a_ratio = cfg.medium.a_m / cfg.medium.g, rho0 = cfg.medium.rho0, h0 = cfg.medium.h0;

  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "medium" && section != "scenario")
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside a section");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    const auto unknown = [&] {
      return ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "' in [" +
                         section + "]");
    };

    if (section == "run") {
      if (key == "seed") {
        cfg.seed = parse_unsigned(value, line_no);
      } else if (key == "format") {
        if (value == "csv") cfg.format = OutputFormat::Csv;
        else if (value == "json") cfg.format = OutputFormat::Json;
        else throw ConfigError("line " + std::to_string(line_no) + ": format must be csv or json");
      } else if (key == "snapshot_every") {
        cfg.snapshot_every = static_cast<int>(parse_unsigned(value, line_no));
      } else {
        throw unknown();
      }
    } else if (section == "medium") {
      const double v = parse_number(value, line_no);
      if (key == "c") c = v;
      else if (key == "omega0") omega0 = v;
      else if (key == "g") g = v;
      else if (key == "a_m_over_g") a_ratio = v;
      else if (key == "rho0") rho0 = v;
      else if (key == "h0") h0 = v;
      else throw unknown();
    } else {
      const auto it = cfg.controls.find(key);
      if (it == cfg.controls.end()) throw unknown();
      it->second = parse_number(value, line_no);
    }
  }
  try {
    cfg.medium = MediumParams::make(c, omega0, g, a_ratio * g, rho0, h0);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[medium]: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario,
                           const std::map<std::string, double>& defaults,
                           const MediumParams& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), scenario, defaults, base);
}

}  // namespace dropsim
