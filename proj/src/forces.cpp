#include "dropsim/forces.hpp"

#include <cmath>
#include <numbers>

#include "dropsim/errors.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;

double geometry_factor(FlowGeometry g) { return g == FlowGeometry::Hemisphere ? 2.0 : 1.0; }

void require_same_frequency(const Oscillator& a, const Oscillator& b) {
  const double scale = std::max(std::fabs(a.frequency), std::fabs(b.frequency));
  if (std::fabs(a.frequency - b.frequency) > 1e-12 * scale)
    throw DomainError("pair_force: oscillator frequencies differ");
}

}  // namespace

ForceConstants ForceConstants::make(double alpha, double m_eff, double omega, double c) {
  if (!(alpha >= 0.0)) throw DomainError("force constants: alpha must be non-negative");
  if (!(omega > 0.0) || !(m_eff > 0.0)) throw DomainError("force constants: m, omega > 0");
  return {alpha, m_eff * c * c / omega, m_eff, omega, false};
}

double radial_flow_speed(double Q, double r, FlowGeometry geometry) {
  if (!(r > 0.0)) throw DomainError("radial_flow_speed: singular at r = 0");
  return -geometry_factor(geometry) * Q / (4.0 * kPi * r * r);
}

double instantaneous_pair_force(const Oscillator& a, const Oscillator& b, double rho0, double r,
                                double t, FlowGeometry geometry) {
  const double qa = a.Q_amp * std::cos(a.frequency * t + a.phase);
  const double qb = b.Q_amp * std::cos(b.frequency * t + b.phase);
  // Inflow speed at b is -U; b ingests momentum rho0 |U| Q_b towards a.
  return -rho0 * radial_flow_speed(qa, r, geometry) * qb;
}

double pair_force(const Oscillator& a, const Oscillator& b, double rho0, double r,
                  FlowGeometry geometry) {
  if (!(r > 0.0)) throw DomainError("pair_force: separation must be positive");
  require_same_frequency(a, b);
  return geometry_factor(geometry) * rho0 * a.Q_amp * b.Q_amp * std::cos(a.phase - b.phase) /
         (8.0 * kPi * r * r);
}

Vec2 pair_force_vector(const Oscillator& a, const Oscillator& b, double rho0,
                       FlowGeometry geometry) {
  const Vec2 d = b.position - a.position;
  const double r = norm(d);
  const double f = pair_force(a, b, rho0, r, geometry);
  return (f / r) * d;
}

double droplet_flow_rate(double volume, double frequency_hz, double beta) {
  if (volume < 0.0 || frequency_hz < 0.0 || beta < 0.0)
    throw DomainError("droplet_flow_rate: arguments must be non-negative");
  return beta * frequency_hz * volume;
}

ForceConstants conventional_constants(double A, double r0, double omega, const MediumParams& p) {
  if (!(r0 > 0.0) || !(omega > 0.0)) throw DomainError("conventional_constants: r0, omega > 0");
  const double ratio = r0 * omega / p.c;
  const double m = p.rho0 * (2.0 * kPi / 3.0) * r0 * r0 * r0;
  ForceConstants k = ForceConstants::make(3.0 * A * A * ratio * ratio * ratio, m, omega, p.c);
  k.large_amplitude = std::fabs(A) > 0.3;
  return k;
}

double inverse_square_force(const ForceConstants& k, double c, double r) {
  if (!(r > 0.0)) throw DomainError("inverse_square_force: r must be positive");
  return k.alpha * k.bbar * c / (r * r);
}

double magnetic_factor(double v, const MediumParams& p) {
  if (!(std::fabs(v) < p.c)) throw DomainError("magnetic_factor: |v| >= c");
  const double b = v / p.c;
  return 1.0 - b * b;
}

double parallel_speed_from_factor(double factor, const MediumParams& p) {
  if (!(factor > 0.0 && factor <= 1.0)) throw DomainError("factor must lie in (0, 1]");
  return p.c * std::sqrt(1.0 - factor);
}

Trajectory boundary_reflection(const WalkerState& walker, const Wall& wall,
                               const ForceConstants& consts, const ReflectionConfig& cfg) {
  const MediumParams& med = cfg.medium;
  const double nn = norm(wall.normal);
  if (!(nn > 0.0)) throw DomainError("boundary_reflection: wall normal is zero");
  const Vec2 n{wall.normal.x / nn, wall.normal.y / nn};
  const Vec2 tan{-n.y, n.x};
  const double cap = walker.speed_cap;
  if (!(cap > 0.0) || std::fabs(norm(walker.velocity) - cap) > 1e-9 * cap)
    throw DomainError("boundary_reflection: |velocity| must equal speed_cap");
  if (!(cap < med.c)) throw DomainError("boundary_reflection: speed_cap >= c");

  const Vec2 rel = walker.position - wall.point;
  double d = dot(rel, n);
  double u = dot(rel, tan);
  double vn = dot(walker.velocity, n);
  double vt = dot(walker.velocity, tan);
  if (!(d > 0.0)) throw DomainError("boundary_reflection: walker is behind the wall");
  if (!(vn < 0.0)) throw DomainError("boundary_reflection: walker is not approaching the wall");

  const double v_acq = cfg.acquired_parallel_speed.value_or(cap);
  if (!(v_acq >= 0.0 && v_acq < med.c))
    throw DomainError("boundary_reflection: acquired speed outside [0, c)");
  const double dt = cfg.dt > 0.0 ? cfg.dt : med.tau / 50.0;
  // Image at distance 2d, bouncing antiphase: F = alpha bbar c / (2d)^2.
  const double K = consts.alpha * consts.bbar * med.c / (4.0 * consts.m_eff);
  auto factor_for = [&](double v_par) {
    return cfg.magnetic ? 1.0 - (v_par * v_par) / (med.c * med.c) : 1.0;
  };
  double factor = factor_for(vt);
  auto accel = [&](double dist) { return factor * K / (dist * dist); };
  auto energy = [&](double dist, double v) { return 0.5 * v * v + factor * K / dist; };

  Trajectory out;
  const double d_start = d;
  out.closest_distance = d;
  auto record = [&](double t) {
    const Vec2 pos = wall.point + d * n + u * tan;
    const Vec2 vel = vn * n + vt * tan;
    out.records.push_back({t, pos.x, pos.y, vel.x, vel.y});
  };
  record(0.0);

  double e0 = energy(d, vn);
  bool turned = false;
  double a = accel(d);
  const int strobe = std::max(1, cfg.strobe_every);
  long step = 0;
  for (double t = dt; t <= cfg.t_max + 0.5 * dt; t += dt) {
    ++step;
    d += vn * dt + 0.5 * a * dt * dt;
    u += vt * dt;
    if (!(d > 0.0)) throw NumericError("boundary_reflection: walker crossed the wall");
    const double a_new = accel(d);
    vn += 0.5 * (a + a_new) * dt;
    a = a_new;
    out.closest_distance = std::min(out.closest_distance, d);

    if (std::fabs(energy(d, vn) - e0) > cfg.energy_tolerance * std::fabs(e0))
      throw NumericError("boundary_reflection: energy drift, timestep too large");

    if (!turned && vn >= 0.0) {
      turned = true;
      const double side = vt < 0.0 ? -1.0 : 1.0;
      vt = side * v_acq;
      out.acquired_parallel_speed = v_acq;
      factor = factor_for(vt);
      a = accel(d);
      e0 = energy(d, vn);
    }
    if (step % strobe == 0) {
      record(t);
      if (turned && out.turning_index == 0) out.turning_index = out.records.size() - 1;
    }
    if (turned && d >= d_start) break;
  }
  if (!turned) throw NumericError("boundary_reflection: no reflection within t_max");
  return out;
}

double static_potential(std::span<const PointSource3> sources, double x, double y, double z) {
  double phi = 0.0;
  for (const PointSource3& s : sources) {
    const double dx = x - s.x, dy = y - s.y, dz = z - s.z;
    phi += s.strength / std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return phi;
}

double static_laplace_residual(std::span<const PointSource3> sources, const Box3& box) {
  if (box.n < 3 || !(box.length > 0.0)) throw DomainError("laplace residual: degenerate box");
  const double h = box.length / (box.n - 1);
  double sum = 0.0;
  long count = 0;
  for (int k = 1; k < box.n - 1; ++k)
    for (int j = 1; j < box.n - 1; ++j)
      for (int i = 1; i < box.n - 1; ++i) {
        const double x = box.x0 + i * h, y = box.y0 + j * h, z = box.z0 + k * h;
        const double c = static_potential(sources, x, y, z);
        const double lap =
            (static_potential(sources, x + h, y, z) + static_potential(sources, x - h, y, z) +
             static_potential(sources, x, y + h, z) + static_potential(sources, x, y - h, z) +
             static_potential(sources, x, y, z + h) + static_potential(sources, x, y, z - h) -
             6.0 * c) /
            (h * h);
        sum += lap * lap;
        ++count;
      }
  return std::sqrt(sum / count);
}

}  // namespace dropsim
