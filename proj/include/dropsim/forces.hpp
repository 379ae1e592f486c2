#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dropsim/bounce.hpp"
#include "dropsim/wavefield.hpp"

namespace dropsim {

/// A pulsating source of volume flow Q_amp cos(frequency t + phase).
struct Oscillator {
  Vec2 position{};
  double Q_amp = 0.0;  // mm^3/s
  double phase = 0.0;
  double frequency = 0.0;  // rad/s
  Vec2 moving_velocity{};
};

enum class FlowGeometry { FullSphere, Hemisphere };

/// alpha and bbar of F = alpha bbar c / r^2, with bbar = m c^2 / omega.
struct ForceConstants {
  double alpha = 0.0;
  double bbar = 0.0;   // g mm^2 / s
  double m_eff = 0.0;  // g
  double omega = 0.0;  // rad/s
  bool large_amplitude = false;  // A > 0.3, outside the small-A derivation

  static ForceConstants make(double alpha, double m_eff, double omega, double c);
};

/// -Q / (4 pi r^2), doubled over a hemisphere. Throws DomainError at r = 0.
double radial_flow_speed(double Q, double r, FlowGeometry geometry = FlowGeometry::FullSphere);

/// Instantaneous momentum intake rho0 U_a(t) Q_b(t) of b in a's flow
/// (positive = towards a).
double instantaneous_pair_force(const Oscillator& a, const Oscillator& b, double rho0, double r,
                                double t, FlowGeometry geometry = FlowGeometry::FullSphere);

/// Cycle-averaged radial force, positive = attraction:
/// rho0 Q1 Q2 cos(dphi) / (8 pi r^2), doubled for the hemisphere.
double pair_force(const Oscillator& a, const Oscillator& b, double rho0, double r,
                  FlowGeometry geometry = FlowGeometry::FullSphere);

/// Force on a from b as a vector, using the oscillator positions.
Vec2 pair_force_vector(const Oscillator& a, const Oscillator& b, double rho0,
                       FlowGeometry geometry = FlowGeometry::FullSphere);

/// Q = beta f V.
double droplet_flow_rate(double volume, double frequency_hz, double beta);

/// alpha = 3 A^2 (r0 omega / c)^3, bbar = m c^2 / omega, m = rho0 (2 pi / 3) r0^3.
ForceConstants conventional_constants(double A, double r0, double omega, const MediumParams& p);

/// alpha bbar c / r^2.
double inverse_square_force(const ForceConstants& k, double c, double r);

/// 1 - v^2 / c^2. Throws DomainError for |v| >= c.
double magnetic_factor(double v, const MediumParams& p);

/// Inverts magnetic_factor: the common parallel speed that reduces the
/// force by the given ratio.
double parallel_speed_from_factor(double factor, const MediumParams& p);

/// Infinite straight wall through `point`; `normal` points into the fluid.
struct Wall {
  Vec2 point{};
  Vec2 normal{0.0, 1.0};
};

struct ReflectionConfig {
  MediumParams medium{};
  double dt = 0.0;              // 0 -> tau / 50
  int strobe_every = 1;         // record every n-th step
  bool magnetic = true;
  double t_max = 20.0;          // s
  double energy_tolerance = 1e-3;
  /// Parallel speed after the normal velocity reverses; unset -> speed_cap,
  /// which is what the constant-speed constraint gives at the turning point.
  std::optional<double> acquired_parallel_speed;
};

struct TrajectoryRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::size_t turning_index = 0;  // first record after the normal velocity reversed
  double acquired_parallel_speed = 0.0;
  double closest_distance = 0.0;
};

/// Walker reflected by its antiphase image behind the wall. The normal
/// motion is integrated by velocity Verlet under the image repulsion,
/// scaled by the magnetic factor of the common parallel velocity. The
/// parallel velocity is constant on each branch; at the turning point the
/// constant-speed constraint hands the walker its acquired parallel speed.
Trajectory boundary_reflection(const WalkerState& walker, const Wall& wall,
                               const ForceConstants& consts, const ReflectionConfig& cfg);

struct PointSource3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double strength = 0.0;
};

struct Box3 {
  double x0 = 0.0, y0 = 0.0, z0 = 0.0;
  double length = 1.0;  // cube edge, mm
  int n = 16;           // nodes per edge
};

/// Cycle-averaged static potential sum q / |x - x_i|.
double static_potential(std::span<const PointSource3> sources, double x, double y, double z);

/// RMS of the 7-point Laplacian of static_potential over a source-free box.
double static_laplace_residual(std::span<const PointSource3> sources, const Box3& box);

}  // namespace dropsim
