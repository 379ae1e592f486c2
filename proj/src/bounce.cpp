#include "dropsim/bounce.hpp"

#include <cmath>
#include <numbers>

#include "dropsim/errors.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;

// Dimensionless flight: tray at G cos(psi), droplet z'' = -1 in units of
// g / Omega_d^2 with psi = Omega_d t. Returns the landing phase.
double landing_phase(double G) {
  const double psi_off = -std::acos(1.0 / G);
  const double z_off = G * std::cos(psi_off);
  const double v_off = -G * std::sin(psi_off);
  auto gap = [&](double psi) {
    const double s = psi - psi_off;
    return z_off + v_off * s - 0.5 * s * s - G * std::cos(psi);
  };
  // Three bounce periods = six drive periods.
  const double horizon = psi_off + 12.0 * kPi;
  const double step = 2.0 * kPi / 400.0;
  double a = psi_off + step;
  double fa = gap(a);
  for (double b = a + step; b <= horizon; a = b, b += step) {
    const double fb = gap(b);
    if (fa > 0.0 && fb <= 0.0) {
      double lo = a;
      double hi = b;
      // 1e-10 s at Omega_d = 100 pi is ~3e-8 rad; go well past that.
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    fa = fb;
  }
  throw RegimeError("landing_time: no contact within 3 bounce periods");
}

}  // namespace

DrivingConfig DrivingConfig::make(double a_m, const MediumParams& p) {
  return make(a_m, p, threshold_reference_phase());
}

DrivingConfig DrivingConfig::make(double a_m, const MediumParams& p, double phase0) {
  if (!(a_m >= 0.0)) throw DomainError("driving: a_m must be non-negative");
  DrivingConfig cfg;
  cfg.a_m = a_m;
  cfg.drive_angular_frequency = 2.0 * p.omega0;
  cfg.drive_amplitude = a_m / (cfg.drive_angular_frequency * cfg.drive_angular_frequency);
  cfg.phase0 = phase0;
  return cfg;
}

double parametric_gain_sign(double a_m, double g) { return g - a_m / 3.0; }

double threshold_reference_phase() {
  static const double phase = landing_phase(3.0);
  return phase;
}

double landing_time(const DrivingConfig& cfg, const MediumParams& p) {
  if (!(cfg.a_m > p.g)) throw RegimeError("landing_time: a_m <= g, droplet never leaves");
  const double psi = landing_phase(cfg.a_m / p.g);
  const double t_land = (psi - cfg.phase0) / cfg.drive_angular_frequency;
  double T = std::fmod(t_land, p.tau);
  if (T < 0.0) T += p.tau;
  if (T >= p.tau - 1e-13 * p.tau) T = 0.0;
  return T;
}

double speed_law_lhs(double v, const MediumParams& p) {
  const double b2 = (v / p.c) * (v / p.c);
  return (b2 + 0.5) / (1.0 - b2);
}

double walker_speed(double T, double kappa, const MediumParams& p) {
  const double s = kappa * T;
  if (s <= 0.5) return 0.0;
  // (b2 + 1/2) / (1 - b2) = s  =>  b2 = (s - 1/2) / (s + 1)
  return p.c * std::sqrt((s - 0.5) / (s + 1.0));
}

double calibrate_kappa(double T, double v, const MediumParams& p) {
  if (!(T > 0.0)) throw DomainError("calibrate_kappa: T must be positive");
  if (!(std::fabs(v) < p.c)) throw DomainError("calibrate_kappa: |v| >= c");
  return speed_law_lhs(v, p) / T;
}

double equilibrium_offset(double T, double v, const MediumParams& p) {
  if (!(std::fabs(v) < p.c)) throw DomainError("equilibrium_offset: |v| >= c");
  return v * T / speed_law_lhs(v, p);
}

bool small_angle_valid(double T, const MediumParams& p) { return T <= kSmallAngleLimit * p.tau; }

}  // namespace dropsim
