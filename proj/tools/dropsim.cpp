#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dropsim/errors.hpp"
#include "dropsim/harness/config.hpp"
#include "dropsim/harness/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Droplet pilot-wave scenarios"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format;
  bool list = false;
  app.add_option("scenario", scenario, "scenario name (see --list)");
  app.add_option("--config", config_path, "config file with [run], [medium], [scenario]");
  app.add_option("--out", out_dir, "output directory (default out/<scenario>)");
  app.add_option("--seed", seed, "overrides [run] seed");
  app.add_option("--format", format, "csv or json, overrides [run] format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--list", list, "print the scenarios and their controls");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? dropsim::kExitOk : dropsim::kExitConfig;
  }

  if (list) {
    for (const auto& s : dropsim::scenario_registry()) {
      std::cout << s.name << "  " << s.description << "\n";
      for (const auto& [k, v] : s.defaults)
        std::cout << "    " << k << " = " << dropsim::format_number(v) << "\n";
    }
    return 0;
  }
  if (scenario.empty()) {
    std::cerr << "dropsim: a scenario name is required (try --list)\n";
    return dropsim::kExitConfig;
  }

  try {
    const auto& info = dropsim::scenario_info(scenario);
    dropsim::ScenarioConfig cfg =
        config_path.empty()
            ? dropsim::parse_config("", scenario, info.defaults, info.medium)
            : dropsim::load_config(config_path, scenario, info.defaults, info.medium);
    if (seed) cfg.seed = *seed;
    if (!format.empty())
      cfg.format = format == "json" ? dropsim::OutputFormat::Json : dropsim::OutputFormat::Csv;
    cfg.out_dir = out_dir.empty() ? std::filesystem::path("out") / scenario
                                  : std::filesystem::path(out_dir);

    const dropsim::RunResult r = dropsim::run_scenario(cfg);
    std::cout << r.summary["metrics"].dump(2) << "\n";
    std::cout << "manifest: " << r.manifest.string() << "\n";
    return 0;
  } catch (const dropsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dropsim::kExitConfig;
  } catch (const dropsim::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return dropsim::kExitConfig;
  } catch (const dropsim::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return dropsim::kExitRegime;
  } catch (const dropsim::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return dropsim::kExitNumeric;
  }
}
