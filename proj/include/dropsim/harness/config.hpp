#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "dropsim/wavefield.hpp"

namespace dropsim {

enum class OutputFormat { Csv, Json };

struct ScenarioConfig {
  std::string scenario;
  MediumParams medium{};
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  OutputFormat format = OutputFormat::Csv;
  int snapshot_every = 0;  // 0 -> no field snapshots
  /// Scenario controls; always holds every key the scenario knows about.
  std::map<std::string, double> controls;

  double control(const std::string& key) const;
};

/// Text format, one `key = value` per line, `#` comments:
///
///   [run]       seed, format (csv | json), snapshot_every
///   [medium]    c, omega0, g, a_m_over_g, rho0, h0
///   [scenario]  numeric controls of the chosen scenario
///
/// Unknown sections, unknown keys, duplicate keys and unparsable values
/// throw ConfigError. `defaults` lists the scenario's controls and `base`
/// its medium before overrides.
ScenarioConfig parse_config(std::string_view text, const std::string& scenario,
                            const std::map<std::string, double>& defaults,
                            const MediumParams& base = {});

ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario,
                           const std::map<std::string, double>& defaults,
                           const MediumParams& base = {});

}  // namespace dropsim
