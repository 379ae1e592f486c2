#include "dropsim/wavefield.hpp"

#include <cmath>

#include "dropsim/bessel.hpp"
#include "dropsim/errors.hpp"
#include "dropsim/kernels.hpp"

namespace dropsim {

MediumParams MediumParams::make(double c, double omega0, double g, double a_m, double rho0,
                                double h0) {
  MediumParams p;
  p.c = c;
  p.omega0 = omega0;
  p.tau = 2.0 * std::numbers::pi / omega0;
  p.g = g;
  p.a_m = a_m;
  p.rho0 = rho0;
  p.h0 = h0;
  p.validate();
  return p;
}

void MediumParams::validate() const {
  if (!(c > 0.0)) throw DomainError("medium: c must be positive");
  if (!(omega0 > 0.0)) throw DomainError("medium: omega0 must be positive");
  if (!(rho0 > 0.0)) throw DomainError("medium: rho0 must be positive");
  if (!(h0 >= 0.0)) throw DomainError("medium: h0 must be non-negative");
  if (!(a_m >= 0.0)) throw DomainError("medium: a_m must be non-negative");
  if (std::fabs(omega0 * tau - 2.0 * std::numbers::pi) > 1e-12)
    throw DomainError("medium: omega0 * tau must equal 2 pi");
}

BoostedFrame BoostedFrame::make(double v, double c) {
  if (!(std::fabs(v) < c)) throw DomainError("boost: |v| must be below the wave speed");
  const double beta = v / c;
  return {v, 1.0 / std::sqrt(1.0 - beta * beta)};
}

double standing_wave_height(double r, double t, const MediumParams& p) {
  if (r < 0.0) throw DomainError("standing_wave_height: negative radius");
  return -p.h0 * std::cos(p.omega0 * t) * bessel_j(0, p.omega0 * r / p.c);
}

double rotating_mode_height(const WaveSource& src, double r, double theta, double t,
                            const MediumParams& p) {
  if (r < 0.0) throw DomainError("rotating_mode_height: negative radius");
  return src.amplitude * std::cos(p.omega0 * t - src.m * theta + src.phase) *
         bessel_j_signed(src.m, p.k_r() * r);
}

Event lorentz_boost(Event e, const BoostedFrame& frame, const MediumParams& p) {
  if (!(std::fabs(frame.v) < p.c)) throw DomainError("lorentz_boost: |v| >= c");
  const double g = frame.gamma;
  return {g * (e.x - frame.v * e.t), e.y, g * (e.t - frame.v * e.x / (p.c * p.c))};
}

namespace {

double walker_height(double amplitude, double phase, double dx, double y, double t,
                     const BoostedFrame& f, const MediumParams& p) {
  const double g2 = f.gamma * f.gamma;
  const double c2 = p.c * p.c;
  const double r2 = g2 * g2 * dx * dx + g2 * y * y;
  const double arg = p.omega0 * t - g2 * p.omega0 * f.v * dx / c2 + phase;
  return -amplitude * std::cos(arg) * bessel_j(0, p.omega0 * std::sqrt(r2) / p.c);
}

}  // namespace

double walker_wave_height(double dx, double y, double t, const BoostedFrame& frame,
                          const MediumParams& p) {
  if (!(std::fabs(frame.v) < p.c)) throw DomainError("walker_wave_height: |v| >= c");
  return walker_height(p.h0, 0.0, dx, y, t, frame, p);
}

SlopeCurvature walker_slope_and_curvature(double T, const BoostedFrame& frame,
                                          const MediumParams& p) {
  if (!(std::fabs(frame.v) < p.c)) throw DomainError("walker slope: |v| >= c");
  // At the centre J0' = 0 and J0'' = -1/2, so the Bessel factor only
  // enters the curvature, weighted by the same cos(omega0 T) as the phase term.
  const double g2 = frame.gamma * frame.gamma;
  const double beta = frame.v / p.c;
  const double w = p.omega0;
  const double ph = w * T;
  SlopeCurvature out;
  out.slope = -p.h0 * g2 * w / p.c * beta * std::sin(ph);
  out.curvature = p.h0 * g2 * g2 * w * w / (p.c * p.c) * std::cos(ph) * (beta * beta + 0.5);
  return out;
}

double superpose(std::span<const WaveSource> sources, Event at, const MediumParams& p) {
  double sum = 0.0;
  for (const WaveSource& s : sources) {
    const double t_local = at.t - s.birth_time;
    const Vec2 d{at.x - s.center.x, at.y - s.center.y};
    const double speed = norm(s.velocity);
    if (speed > 0.0) {
      if (s.m != 0) throw DomainError("superpose: moving sources must have m = 0");
      const BoostedFrame f = BoostedFrame::make(speed, p.c);
      const Vec2 e{s.velocity.x / speed, s.velocity.y / speed};
      const double along = dot(d, e) - speed * t_local;
      const double across = -d.x * e.y + d.y * e.x;
      sum += walker_height(s.amplitude, s.phase, along, across, t_local, f, p);
    } else if (s.m == 0) {
      const double r = norm(d);
      sum += -s.amplitude * std::cos(p.omega0 * t_local + s.phase) *
             bessel_j(0, p.k_r() * r);
    } else {
      sum += rotating_mode_height(s, norm(d), std::atan2(d.y, d.x), t_local, p);
    }
  }
  return sum;
}

double wave_equation_residual(const HeightField& field, const ResidualGrid& grid,
                              const MediumParams& p, bool parallel) {
  if (!(grid.dx > 0.0) || !(grid.dt > 0.0) || grid.nx < 1 || grid.ny < 1)
    throw DomainError("wave_equation_residual: degenerate window");
  const std::vector<double> rows = parallel ? kernels::residual_rows_omp(field, grid, p)
                                            : kernels::residual_rows_serial(field, grid, p);
  const double total = kernels::pairwise_sum(rows);
  return std::sqrt(total / (static_cast<double>(grid.nx) * grid.ny));
}

}  // namespace dropsim
