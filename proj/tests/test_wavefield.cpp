#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dropsim/bessel.hpp"
#include "dropsim/errors.hpp"
#include "dropsim/rng.hpp"
#include "dropsim/wavefield.hpp"

using namespace dropsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJ0Zero = 2.404825557695773;

MediumParams medium() { return MediumParams{}; }

double residual_at(const HeightField& f, double dx, const MediumParams& p, double x0, double y0,
                   double span) {
  ResidualGrid g;
  g.x0 = x0;
  g.y0 = y0;
  g.t0 = 0.013;
  g.dx = dx;
  g.dt = 0.5 * dx / p.c;
  g.nx = g.ny = static_cast<int>(std::lround(span / dx));
  return wave_equation_residual(f, g, p);
}

// Zeros of h(x, 0, 0) on (0, x_max] that stay zero a quarter and an eighth
// of a cycle later: those belong to the Bessel factor, not the phase factor.
std::vector<double> standing_zeros(const BoostedFrame& f, const MediumParams& p, double x_max) {
  std::vector<double> out;
  const double step = 1e-3 * p.c / p.omega0;
  auto h = [&](double x) { return walker_wave_height(x, 0.0, 0.0, f, p); };
  for (double a = step; a < x_max; a += step) {
    double lo = a, hi = a + step;
    if (h(lo) * h(hi) > 0.0) continue;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(lo) * h(mid) <= 0.0 ? hi : lo) = mid;
    }
    const double z = 0.5 * (lo + hi);
    const double later = std::max(std::fabs(walker_wave_height(z, 0.0, p.tau / 4.0, f, p)),
                                  std::fabs(walker_wave_height(z, 0.0, p.tau / 8.0, f, p)));
    if (later < 1e-6 * p.h0) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("medium parameters validate their invariants") {
  const MediumParams p = medium();
  CHECK(p.omega0 * p.tau == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(p.walking_regime());
  CHECK_THROWS_AS(MediumParams::make(-1.0, p.omega0, p.g, p.a_m, p.rho0, p.h0), DomainError);
  CHECK_THROWS_AS(MediumParams::make(p.c, p.omega0, p.g, p.a_m, 0.0, p.h0), DomainError);
  CHECK_THROWS_AS(MediumParams::make(p.c, p.omega0, p.g, p.a_m, p.rho0, -0.1), DomainError);
  const MediumParams q = MediumParams::make(12.0, 100.0, p.g, 2.0 * p.g, p.rho0, p.h0);
  CHECK(q.tau == doctest::Approx(2.0 * kPi / 100.0));
  CHECK_FALSE(q.walking_regime());
}

TEST_CASE("standing wave examples") {
  const MediumParams p = medium();
  CHECK(standing_wave_height(0.0, 0.0, p) == doctest::Approx(-p.h0));
  CHECK(std::fabs(standing_wave_height(0.0, p.tau / 4.0, p)) < 1e-15);
  for (double t : {0.0, 0.011, 0.3})
    CHECK(std::fabs(standing_wave_height(kJ0Zero * p.c / p.omega0, t, p)) < 1e-10);
  CHECK_THROWS_AS(standing_wave_height(-1.0, 0.0, p), DomainError);
}

TEST_CASE("rotating mode of order 0 with phase pi is the standing wave") {
  // h0 cos(w0 t + pi) J0 = -h0 cos(w0 t) J0, the standing wave itself.
  const MediumParams p = medium();
  const WaveSource m0{{}, 0.0, {}, p.h0, 0, kPi};
  for (double r : {0.0, 0.3, 1.7})
    for (double t : {0.0, 0.007, 0.021})
      CHECK(rotating_mode_height(m0, r, 0.4, t, p) ==
            doctest::Approx(standing_wave_height(r, t, p)).epsilon(1e-14));
}

TEST_CASE("rotating mode of order 0 with phase pi is the negated standing wave" *
          doctest::should_fail()) {
  const MediumParams p = medium();
  const WaveSource m0{{}, 0.0, {}, p.h0, 0, kPi};
  CHECK(rotating_mode_height(m0, 0.3, 0.4, 0.007, p) ==
        doctest::Approx(-standing_wave_height(0.3, 0.007, p)).epsilon(1e-14));
}

TEST_CASE("rotating mode travels in theta") {
  const MediumParams p = medium();

  const WaveSource m1{{}, 0.0, {}, p.h0, 1, 0.0};
  CHECK(rotating_mode_height(m1, 0.0, 1.1, 0.3, p) == 0.0);
  const double t = 0.0123, delta = 0.0031, r = 0.35;
  for (int k = 0; k < 24; ++k) {
    const double th = 2.0 * kPi * k / 24.0;
    CHECK(rotating_mode_height(m1, r, th + p.omega0 * delta, t + delta, p) ==
          doctest::Approx(rotating_mode_height(m1, r, th, t, p)).scale(p.h0).epsilon(1e-12));
  }
}

TEST_CASE("lorentz boost examples and velocity addition") {
  const MediumParams p = medium();
  const Event e{0.7, -0.2, 0.13};
  const Event id = lorentz_boost(e, BoostedFrame::make(0.0, p.c), p);
  CHECK(id.x == e.x);
  CHECK(id.y == e.y);
  CHECK(id.t == e.t);

  const BoostedFrame f = BoostedFrame::make(0.6 * p.c, p.c);
  CHECK(f.gamma == doctest::Approx(1.25).epsilon(1e-15));
  const Event b = lorentz_boost({0.0, 0.0, 1.0}, f, p);
  CHECK(b.x == doctest::Approx(-0.75 * p.c).epsilon(1e-14));
  CHECK(b.t == doctest::Approx(1.25).epsilon(1e-14));

  CHECK_THROWS_AS(BoostedFrame::make(p.c, p.c), DomainError);

  Philox rng(7, 0);
  for (int k = 0; k < 200; ++k) {
    const double v1 = (2.0 * rng.uniform() - 1.0) * 0.9 * p.c;
    const double v2 = (2.0 * rng.uniform() - 1.0) * 0.9 * p.c;
    const Event pt{20.0 * rng.uniform() - 10.0, rng.uniform(), 2.0 * rng.uniform() - 1.0};
    const Event two = lorentz_boost(lorentz_boost(pt, BoostedFrame::make(v2, p.c), p),
                                    BoostedFrame::make(v1, p.c), p);
    const double v12 = (v1 + v2) / (1.0 + v1 * v2 / (p.c * p.c));
    const Event one = lorentz_boost(pt, BoostedFrame::make(v12, p.c), p);
    CHECK(two.x == doctest::Approx(one.x).scale(1.0).epsilon(1e-12));
    CHECK(two.t == doctest::Approx(one.t).scale(1.0).epsilon(1e-12));
    CHECK(two.y == one.y);
  }
}

TEST_CASE("boost contracts x-intervals at fixed t and dilates time at x = vt") {
  const MediumParams p = medium();
  const BoostedFrame f = BoostedFrame::make(0.5 * p.c, p.c);
  const Event a = lorentz_boost({1.0, 0.0, 0.0}, f, p);
  const Event b = lorentz_boost({3.5, 0.0, 0.0}, f, p);
  CHECK(b.x - a.x == doctest::Approx(f.gamma * 2.5).epsilon(1e-14));
  const Event c = lorentz_boost({f.v * 0.2, 0.0, 0.2}, f, p);
  const Event d = lorentz_boost({f.v * 0.7, 0.0, 0.7}, f, p);
  CHECK(d.t - c.t == doctest::Approx(0.5 / f.gamma).epsilon(1e-13));
}

TEST_CASE("walker field examples") {
  const MediumParams p = medium();
  const BoostedFrame rest = BoostedFrame::make(0.0, p.c);
  for (double x : {0.0, 0.2, 1.3})
    for (double y : {0.0, -0.4})
      CHECK(walker_wave_height(x, y, 0.017, rest, p) ==
            doctest::Approx(standing_wave_height(std::hypot(x, y), 0.017, p)).epsilon(1e-14));

  const BoostedFrame f = BoostedFrame::make(0.5 * p.c, p.c);
  for (double t : {0.0, 0.003, 0.019, 0.04})
    CHECK(walker_wave_height(0.0, 0.0, t, f, p) ==
          doctest::Approx(-p.h0 * std::cos(p.omega0 * t)).epsilon(1e-14));

  const auto still = standing_zeros(rest, p, 20.0 * p.c / p.omega0);
  const auto moving = standing_zeros(f, p, 20.0 * p.c / p.omega0);
  REQUIRE(still.size() >= 3);
  REQUIRE(moving.size() >= 3);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(moving[k] == doctest::Approx(still[k] / (f.gamma * f.gamma)).epsilon(0.01));
}

TEST_CASE("slope and curvature against finite differences") {
  const MediumParams p = medium();
  const BoostedFrame rest = BoostedFrame::make(0.0, p.c);
  CHECK(walker_slope_and_curvature(0.0, BoostedFrame::make(0.4 * p.c, p.c), p).slope == 0.0);
  CHECK(walker_slope_and_curvature(0.0, rest, p).curvature ==
        doctest::Approx(p.h0 * p.omega0 * p.omega0 / (2.0 * p.c * p.c)).epsilon(1e-14));

  const double e = 1e-3 * p.c / p.omega0;
  for (int iv = 1; iv <= 9; ++iv)
    for (double Tf : {0.01, 0.05, 0.1, 0.15, 0.2}) {
      const BoostedFrame f = BoostedFrame::make(0.1 * iv * p.c, p.c);
      const double T = Tf * p.tau;
      auto h = [&](double x) { return walker_wave_height(x, 0.0, T, f, p); };
      const double slope = (-h(2 * e) + 8 * h(e) - 8 * h(-e) + h(-2 * e)) / (12 * e);
      const double curv = (-h(2 * e) + 16 * h(e) - 30 * h(0) + 16 * h(-e) - h(-2 * e)) / (12 * e * e);
      const SlopeCurvature sc = walker_slope_and_curvature(T, f, p);
      CAPTURE(iv);
      CAPTURE(Tf);
      CHECK(sc.slope == doctest::Approx(slope).epsilon(1e-6));
      CHECK(sc.curvature == doctest::Approx(curv).epsilon(1e-6));
    }
}

TEST_CASE("superpose is linear") {
  const MediumParams p = medium();
  CHECK(superpose({}, {0.3, 0.1, 0.02}, p) == 0.0);

  const WaveSource s{{0.2, -0.1}, 0.01, {3.0, 1.0}, p.h0, 0, 0.3};
  const WaveSource pair[] = {s, s};
  for (double x : {-1.0, 0.0, 0.7}) {
    const Event at{x, 0.4, 0.05};
    const WaveSource one[] = {s};
    CHECK(superpose(pair, at, p) == 2.0 * superpose(one, at, p));
  }

  std::vector<WaveSource> a{s, {{1.0, 1.0}, 0.0, {}, 0.5 * p.h0, 0, 0.0}};
  std::vector<WaveSource> b{{{-0.5, 0.0}, 0.02, {}, p.h0, 1, 0.2},
                            {{0.0, 0.3}, -0.01, {0.0, -2.0}, p.h0, 0, 0.0}};
  std::vector<WaveSource> all = a;
  all.insert(all.end(), b.begin(), b.end());
  for (double x : {-0.9, 0.15, 2.2}) {
    const Event at{x, -0.3, 0.071};
    CHECK(superpose(all, at, p) ==
          doctest::Approx(superpose(a, at, p) + superpose(b, at, p)).epsilon(1e-15).scale(p.h0));
  }
}

TEST_CASE("walker waves reinforce across the direction of motion") {
  const MediumParams p = medium();
  const double v = 0.5 * p.c;
  std::vector<WaveSource> src;
  for (int n = 0; n < 3; ++n)
    src.push_back({{-v * n * p.tau, 0.0}, -n * p.tau, {v, 0.0}, p.h0, 0, 0.0});
  // Cycle envelope of |h| at equal radius across and along the motion,
  // averaged over a radial band of several wavelengths.
  const double lam = 2.0 * kPi * p.c / p.omega0;
  double across = 0.0, along = 0.0;
  for (int ir = 0; ir < 60; ++ir) {
    const double R = lam * (1.0 + 3.0 * ir / 60.0);
    double m_across = 0.0, m_along = 0.0;
    for (int it = 0; it < 32; ++it) {
      const double t = p.tau * it / 32.0;
      m_across = std::max(m_across, std::fabs(superpose(src, {v * t, R, t}, p)));
      m_along = std::max(m_along, std::fabs(superpose(src, {v * t + R, 0.0, t}, p)));
    }
    across += m_across;
    along += m_along;
  }
  CHECK(across > along);
}

TEST_CASE("wave equation residual converges at second order for exact solutions") {
  const MediumParams p = medium();
  const double lam = 2.0 * kPi * p.c / p.omega0;
  const HeightField standing = [&](double x, double y, double t) {
    return standing_wave_height(std::hypot(x, y), t, p);
  };
  const BoostedFrame f = BoostedFrame::make(0.5 * p.c, p.c);
  const HeightField walker = [&](double x, double y, double t) {
    return walker_wave_height(x - f.v * t, y, t, f, p);
  };
  const HeightField fake = [&](double x, double y, double t) {
    return std::cos(p.omega0 * t) * std::exp(-std::hypot(x, y));
  };
  const double dx0 = lam / 16.0;
  for (const HeightField* h : {&standing, &walker}) {
    double prev = residual_at(*h, dx0, p, 0.3 * lam, -0.4 * lam, lam);
    for (int k = 1; k <= 3; ++k) {
      const double cur = residual_at(*h, dx0 / (1 << k), p, 0.3 * lam, -0.4 * lam, lam);
      CHECK(prev / cur >= 3.5);
      CHECK(prev / cur <= 4.5);
      prev = cur;
    }
  }
  const double r1 = residual_at(fake, dx0, p, 0.3 * lam, -0.4 * lam, lam);
  const double r2 = residual_at(fake, dx0 / 8.0, p, 0.3 * lam, -0.4 * lam, lam);
  CHECK(r1 / r2 < 1.5);
  CHECK(r2 > 1.0);

  ResidualGrid bad;
  bad.nx = 0;
  CHECK_THROWS_AS(wave_equation_residual(standing, bad, p), DomainError);
}
