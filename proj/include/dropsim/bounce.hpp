#pragma once

#include "dropsim/wavefield.hpp"

namespace dropsim {

/// Tray forcing. The tray sits at A cos(drive_angular_frequency t + phase0),
/// so its acceleration is -a_m cos(drive_angular_frequency t + phase0).
struct DrivingConfig {
  double a_m = 0.0;
  double drive_angular_frequency = 0.0;  // 2 omega0 for the period-doubled walker
  double drive_amplitude = 0.0;          // a_m / (2 omega0)^2
  double phase0 = 0.0;

  /// phase0 defaults to threshold_reference_phase(): the wave clock starts
  /// at the landing instant of a droplet driven exactly at a_m = 3 g.
  static DrivingConfig make(double a_m, const MediumParams& p);
  static DrivingConfig make(double a_m, const MediumParams& p, double phase0);
};

struct WalkerState {
  Vec2 position{};
  Vec2 velocity{};
  double T = 0.0;          // landing time within the bounce cycle, s
  double speed_cap = 0.0;  // |velocity| fixed by the driving, mm/s
};

/// g - a_m / 3; negative once the driving reverses the restoring force.
double parametric_gain_sign(double a_m, double g);

/// Drive phase of the landing for a_m = 3 g when phase0 = 0.
double threshold_reference_phase();

/// Landing time T in [0, tau): take-off where the tray's downward
/// acceleration first exceeds g, ballistic flight, first re-contact.
/// Throws RegimeError for a_m <= g or when no contact occurs within 3 tau.
double landing_time(const DrivingConfig& cfg, const MediumParams& p);

/// Solves gamma^2 (v^2/c^2 + 1/2) = kappa T for v in [0, c).
/// Returns 0 below the walking onset kappa T = 1/2.
double walker_speed(double T, double kappa, const MediumParams& p);

/// gamma^2 (v^2/c^2 + 1/2), the left-hand side of the speed law.
double speed_law_lhs(double v, const MediumParams& p);

/// kappa that maps landing time T onto walker speed v.
double calibrate_kappa(double T, double v, const MediumParams& p);

/// Offset of the bounce point from the wave centre, from the small-angle
/// balance gamma^2 (v^2/c^2 + 1/2) dx = v T.
double equilibrium_offset(double T, double v, const MediumParams& p);

/// The small-angle forms behind equilibrium_offset are trusted up to 0.15 tau.
inline constexpr double kSmallAngleLimit = 0.15;
bool small_angle_valid(double T, const MediumParams& p);

}  // namespace dropsim
