#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dropsim/forces.hpp"
#include "dropsim/harness/config.hpp"
#include "dropsim/harness/fit.hpp"
#include "dropsim/harness/output.hpp"
#include "dropsim/quantum.hpp"

namespace dropsim {

// ---- walker_speed_sweep ----------------------------------------------------

struct SpeedSweep {
  Table table;  // a_m_over_g, T_over_tau, v, gamma, speed_law_lhs
  double kappa = 0.0;
  FitResult fit;  // speed_law_lhs against T/tau
  double gamma_max = 0.0;
};

/// Landing times over a_m in [lo, hi] g, kappa pinned so the top of the
/// sweep walks at c / margin, then speeds from the speed law.
SpeedSweep walker_speed_sweep(const MediumParams& p, double a_lo_over_g, double a_hi_over_g,
                              int points, double margin);

// ---- boundary_reflection ---------------------------------------------------

struct ReflectionSetup {
  double free_speed = 18.0;  // mm/s
  double alpha = 0.3;
  double r0 = 0.4;              // droplet radius, mm
  double start_factor = 200.0;  // start distance in units of the closest approach
  double dt_over_tau = 0.02;
  double acquired_speed = 18.0;  // parallel speed after the turn
  double window_factor = 50.0;   // fit V_perp^2 where d <= window_factor * d_min
  bool magnetic = true;
};

/// c at which the acquired speed reduces the wall force by `ratio`.
double medium_speed_for_ratio(double parallel_speed, double ratio);

struct ReflectionStudy {
  Trajectory trajectory;
  double d_min = 0.0;        // predicted closest approach
  FitResult incoming;        // V_perp^2 against 1/d before the turn
  FitResult outgoing;        // after the turn
  double v0_fit = 0.0;       // sqrt of the incoming intercept
  double slope_ratio = 0.0;  // outgoing / incoming slope
  double expected_ratio = 0.0;
};

ReflectionStudy reflection_study(const MediumParams& p, const ReflectionSetup& s);

// ---- single_slit / double_slit ---------------------------------------------

struct SlitSetup {
  SlitGeometry geometry{};
  DiffractionGrid grid{};
  DropletRun run{};
  double bin_width = 5.0;  // degrees
};

struct SlitStudy {
  std::optional<double> analytic_deg;
  double walker_speed = 0.0;  // mm/s, from the de Broglie relation
  std::vector<double> edges;  // |theta| bins, degrees
  Histogram histogram;        // flux-weighted, folded
  std::vector<double> far_field;  // Fraunhofer intensity at bin centres
  std::optional<std::size_t> mc_minimum_bin;
  std::optional<std::size_t> far_field_minimum_bin;
  std::size_t launched = 0;
  std::size_t exited = 0;
};

/// Speed whose pilot wavelength is lambda.
double speed_for_wavelength(double lambda, const MediumParams& p);

SlitStudy slit_study(const MediumParams& p, const SlitSetup& s);

// ---- tunnelling_sweep ------------------------------------------------------

struct TunnellingSetup {
  Packet packet{};
  TunnellingGrid grid{};
  std::vector<double> widths{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  double height_ratio = 2.0;  // barrier over the plane-wave energy bbar D k0^2
  double m0 = 2.5e-4;         // g
};

struct TunnellingStudy {
  TunnellingResult result;
  double height = 0.0;
  FitResult fit;             // log T against width
  double decay_rate = 0.0;   // -slope, 1/mm
  double kappa = 0.0;        // sqrt((V0 - E)/(bbar D)) at the plane-wave energy
  std::vector<double> oracle;  // exact plane-wave transmission per row
  FitResult oracle_fit;        // log oracle against width, same widths
};

TunnellingStudy tunnelling_study(const MediumParams& p, const TunnellingSetup& s,
                                 const FieldObserver& observer = {});

// ---- spin_tables -----------------------------------------------------------

struct SpinTables {
  Table alpha_rows;  // alpha, L_over_L0, expected, field_error
  Table pauli_rows;  // beta, phi, sigma_x, sigma_y, sigma_z, expected_x/y/z
  double max_alpha_error = 0.0;
  double max_pauli_error = 0.0;
  double max_field_error = 0.0;
  bool sign_reversed = false;    // chi(beta = 2 pi) = -chi(0) along the path
  bool sigma_returned = false;   // (sx, sy, sz) back to start
  double lifted_beta_end = 0.0;  // tracked beta after the path
  double energy_spread = 0.0;    // max - min of |a1|^2 + |a2|^2 over alpha
};

SpinTables spin_tables(const MediumParams& p);

// ---- registry --------------------------------------------------------------

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::map<std::string, double> defaults;
  MediumParams medium{};
};

const std::vector<ScenarioInfo>& scenario_registry();
/// Throws ConfigError for an unknown name.
const ScenarioInfo& scenario_info(const std::string& name);

struct RunResult {
  Json summary;
  std::filesystem::path manifest;
};

/// Runs the scenario, writes its tables, summary.json and manifest.json
/// into cfg.out_dir. Outputs depend only on the config and seed.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace dropsim
