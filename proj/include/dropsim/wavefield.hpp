#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace dropsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Physical constants of the bath, in mm / s / g.
struct MediumParams {
  double c = 11.95;                       // wave speed near the droplet, mm/s
  double omega0 = 2.0 * std::numbers::pi * 25.0;  // bounce angular frequency
  double tau = 1.0 / 25.0;                // bounce period, omega0 * tau = 2 pi
  double g = 9810.0;                      // mm/s^2
  double a_m = 3.5 * 9810.0;              // peak tray acceleration
  double rho0 = 0.95e-3;                  // g/mm^3 (silicone oil)
  double h0 = 0.02;                       // standing-wave amplitude, mm

  /// Validating constructor; tau is derived from omega0.
  static MediumParams make(double c, double omega0, double g, double a_m, double rho0,
                           double h0);

  double k_r() const { return omega0 / c; }
  bool walking_regime() const { return a_m > 3.0 * g; }
  void validate() const;
};

/// One bounce event; a superposition of these is the surface.
struct WaveSource {
  Vec2 center{};
  double birth_time = 0.0;
  Vec2 velocity{};
  double amplitude = 0.0;
  int m = 0;
  double phase = 0.0;
};

struct BoostedFrame {
  double v = 0.0;
  double gamma = 1.0;

  /// Throws DomainError when |v| >= c.
  static BoostedFrame make(double v, double c);
};

struct Event {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// -h0 cos(omega0 t) J0(omega0 r / c).
double standing_wave_height(double r, double t, const MediumParams& p);

/// amplitude * cos(omega0 t - m theta + phase) J_m(k_r r), in the source's
/// local polar coordinates.
double rotating_mode_height(const WaveSource& src, double r, double theta, double t,
                            const MediumParams& p);

/// x' = gamma (x - v t), y' = y, t' = gamma (t - v x / c^2).
Event lorentz_boost(Event e, const BoostedFrame& frame, const MediumParams& p);

/// Field near a walker: the Lorentz boost composed with the scale
/// enlargement alpha = gamma, so the bounce frequency stays omega0.
/// dx is measured from the moving centre (x - v t).
double walker_wave_height(double dx, double y, double t, const BoostedFrame& frame,
                          const MediumParams& p);

struct SlopeCurvature {
  double slope = 0.0;      // dh/dx, dimensionless
  double curvature = 0.0;  // d2h/dx2, 1/mm
};

/// Exact x-derivatives of walker_wave_height at the walker centre and t = T.
SlopeCurvature walker_slope_and_curvature(double T, const BoostedFrame& frame,
                                          const MediumParams& p);

/// Sum of all source contributions at (x, y, t). Moving sources use the
/// walker field along their velocity; stationary sources of order m use
/// the rotating mode.
double superpose(std::span<const WaveSource> sources, Event at, const MediumParams& p);

using HeightField = std::function<double(double x, double y, double t)>;

struct ResidualGrid {
  double x0 = 0.0;  // window corner
  double y0 = 0.0;
  double t0 = 0.0;  // time slice
  double dx = 0.1;
  double dt = 1e-3;
  int nx = 64;      // interior nodes per direction
  int ny = 64;
};

/// RMS of (h_tt / c^2 - laplacian h) with centred second-order stencils
/// over the window nodes. Rows are summed left to right and combined with
/// a pairwise reduction, so the value is independent of threading.
double wave_equation_residual(const HeightField& field, const ResidualGrid& grid,
                              const MediumParams& p, bool parallel = true);

}  // namespace dropsim
