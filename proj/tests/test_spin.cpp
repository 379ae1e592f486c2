#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dropsim/bessel.hpp"
#include "dropsim/errors.hpp"
#include "dropsim/spin.hpp"

using namespace dropsim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Sigma {
  double x, y, z;
};

Sigma sigma(const SpinState& s) {
  return {spin_projection(s, Axis::X), spin_projection(s, Axis::Y), spin_projection(s, Axis::Z)};
}

// Largest |exact - factored| / h0 over k_r r <= kr_max, all angles and a cycle.
double factored_gap(double omega_ratio, double kr_max) {
  const MediumParams p;
  const RotatingPair pair = RotatingPair::make(omega_ratio * p.omega0, p.h0, p);
  double worst = 0.0;
  for (int ir = 0; ir <= 40; ++ir) {
    const double r = kr_max * ir / 40.0 / p.k_r();
    for (int it = 0; it < 24; ++it)
      for (int is = 0; is < 16; ++is) {
        const double th = 2.0 * kPi * it / 24.0, t = p.tau * is / 16.0;
        const double e = rotating_pair_height(pair, r, th, t, p, PairForm::Exact);
        const double f = rotating_pair_height(pair, r, th, t, p, PairForm::Factored);
        worst = std::max(worst, std::fabs(e - f) / p.h0);
      }
  }
  return worst;
}

}  // namespace

TEST_CASE("rotating pair wavenumbers") {
  const MediumParams p;
  const RotatingPair pair = RotatingPair::make(0.05 * p.omega0, p.h0, p);
  CHECK(p.c * pair.k1 - p.omega0 == doctest::Approx(p.omega0 - p.c * pair.k2).epsilon(1e-12));
  CHECK_THROWS_AS(RotatingPair::make(p.omega0, p.h0, p), DomainError);
  CHECK_THROWS_AS(RotatingPair::make(-1.0, p.h0, p), DomainError);
  CHECK_THROWS_AS(rotating_pair_height(pair, -1.0, 0.0, 0.0, p), DomainError);
}

TEST_CASE("rotating pair node line") {
  const MediumParams p;
  const RotatingPair still = RotatingPair::make(0.0, p.h0, p);
  for (double r : {0.1, 0.4, 1.0})
    for (double t : {0.0, 0.013, 0.029}) {
      CHECK(std::fabs(rotating_pair_height(still, r, kPi / 2.0, t, p)) < 1e-15);
      CHECK(std::fabs(rotating_pair_height(still, r, -kPi / 2.0, t, p)) < 1e-15);
    }
  const RotatingPair pair = RotatingPair::make(0.05 * p.omega0, p.h0, p);
  for (double t : {0.0, 0.11, 0.37})
    for (double r : {0.2, 0.9}) {
      const double node = pair.Omega * t + kPi / 2.0;
      CHECK(std::fabs(rotating_pair_height(pair, r, node, t, p, PairForm::Factored)) < 1e-15);
      CHECK(std::fabs(rotating_pair_height(pair, r, node - kPi, t, p, PairForm::Factored)) <
            1e-15);
    }
}

TEST_CASE("factored pair form tracks the exact form at slow rotation") {
  CHECK(factored_gap(0.01, 1.0) <= 0.01);
  CHECK(factored_gap(0.0, 2.0) <= 1e-15);
}

TEST_CASE("factored pair form within 1% up to Omega = 0.05 omega0" * doctest::should_fail()) {
  // The J1 argument shift k1 - k_r = Omega / c alone gives about 1.6% of h0
  // at k_r r = 1.
  CHECK(factored_gap(0.05, 1.0) <= 0.01);
}

TEST_CASE("mode overlap") {
  const MediumParams p;
  const double r = 0.7, t = 0.017;
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      if (std::abs(m) != std::abs(n)) CHECK(std::fabs(mode_overlap(m, n, r, t, p.h0, p)) <= 1e-10);
  const double j1 = bessel_j(1, p.k_r() * r);
  // Counter-rotating partners: -pi h0^2 J1^2 cos(2 w0 t) at fixed t, zero
  // over a cycle.
  double avg = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double tk = p.tau * k / 64.0;
    CHECK(mode_overlap(1, -1, r, tk, p.h0, p) ==
          doctest::Approx(-kPi * p.h0 * p.h0 * j1 * j1 * std::cos(2.0 * p.omega0 * tk))
              .scale(p.h0 * p.h0)
              .epsilon(1e-12));
    avg += mode_overlap(1, -1, r, tk, p.h0, p) / 64.0;
  }
  CHECK(std::fabs(avg) <= 1e-10 * p.h0 * p.h0);
  for (double tt : {0.0, 0.005, t})
    CHECK(mode_overlap(1, 1, r, tt, p.h0, p) ==
          doctest::Approx(kPi * p.h0 * p.h0 * j1 * j1).epsilon(1e-12));
}

TEST_CASE("counter-rotating modes are orthogonal at every instant" * doctest::should_fail()) {
  const MediumParams p;
  CHECK(std::fabs(mode_overlap(1, -1, 0.7, 0.017, p.h0, p)) <= 1e-10);
}

TEST_CASE("angular momentum table") {
  CHECK(angular_momentum(SpinState::from_alpha(0.0), 2.0) == doctest::Approx(2.0));
  CHECK(std::fabs(angular_momentum(SpinState::from_alpha(kPi / 4.0), 2.0)) < 1e-15);
  CHECK(angular_momentum(SpinState::from_alpha(kPi / 2.0), 2.0) == doctest::Approx(-2.0));
  for (double a = 0.0; a < 2.0 * kPi; a += 0.1)
    CHECK(angular_momentum(SpinState::from_alpha(a), 1.0) ==
          doctest::Approx(std::cos(2.0 * a)).scale(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(angular_momentum(SpinState{0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("superposed field of the real family") {
  const MediumParams p;
  const WaveSource h1{{}, 0.0, {}, p.h0, 1, 0.0};
  const WaveSource hm1{{}, 0.0, {}, p.h0, -1, 0.0};
  for (double a : {0.0, 0.3, kPi / 4.0, 2.0})
    for (double th : {0.0, 1.0, 4.0}) {
      const double r = 0.45, t = 0.0123;
      const SuperposedField f = superposed_field(SpinState::from_alpha(a), r, th, t, p.h0, p);
      const double expect = std::cos(a) * rotating_mode_height(h1, r, th, t, p) +
                            std::sin(a) * rotating_mode_height(hm1, r, th, t, p);
      CHECK(f.height == doctest::Approx(expect).scale(p.h0).epsilon(1e-14));
      CHECK(f.energy_proxy == doctest::Approx(1.0).epsilon(1e-12));
      const SuperposedField g = superposed_field(SpinState::from_alpha(a + kPi), r, th, t, p.h0, p);
      CHECK(g.height == doctest::Approx(-f.height).scale(p.h0).epsilon(1e-14));
    }
}

TEST_CASE("Bloch angles round trip") {
  const SpinState up = SpinState::from_bloch(0.0, 0.0, 0.0);
  CHECK(up.a1 == cplx{1.0, 0.0});
  CHECK(up.a2 == cplx{0.0, 0.0});
  const SpinState x = SpinState::from_bloch(0.0, kPi / 2.0, 0.0);
  CHECK(std::abs(x.a1 - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(x.a2 - 1.0 / std::sqrt(2.0)) < 1e-15);

  for (double S : {-1.0, 0.0, 2.5})
    for (double beta : {0.3, 1.5, 2.9})
      for (double phi : {-2.0, 0.0, 1.1}) {
        const SpinState s = SpinState::from_bloch(S, beta, phi);
        const SpinState scaled{3.0 * s.a1, 3.0 * s.a2};
        const SpinState back = bloch_roundtrip(scaled);
        CHECK(std::abs(back.a1 - scaled.a1) <= 1e-12);
        CHECK(std::abs(back.a2 - scaled.a2) <= 1e-12);
        const BlochAngles a = bloch_angles(s);
        CHECK(a.beta == doctest::Approx(beta).epsilon(1e-12));
      }
  CHECK_THROWS_AS(bloch_angles(SpinState{0.0, 0.0}), DomainError);
}

TEST_CASE("Pauli projections of the eigenvectors") {
  const double h = 1.0 / std::sqrt(2.0);
  const Sigma z = sigma({1.0, 0.0});
  CHECK(z.x == 0.0);
  CHECK(z.y == 0.0);
  CHECK(z.z == 1.0);
  const Sigma x = sigma({h, h});
  CHECK(x.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(x.y) < 1e-15);
  CHECK(std::fabs(x.z) < 1e-15);
  const Sigma y = sigma({h, cplx{0.0, h}});
  CHECK(std::fabs(y.x) < 1e-15);
  CHECK(y.y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(y.z) < 1e-15);
  // The (beta, phi) = (pi/2, pi/2) Bloch state is the same +y eigenvector.
  const Sigma yb = sigma(SpinState::from_bloch(0.0, kPi / 2.0, kPi / 2.0));
  CHECK(yb.y == doctest::Approx(1.0).epsilon(1e-15));
  // (-i, i)/sqrt2 is -i (1, -1)/sqrt2, the -x eigenvector.
  const Sigma m = sigma({cplx{0.0, -h}, cplx{0.0, h}});
  CHECK(m.x == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::fabs(m.y) < 1e-15);
}

TEST_CASE("(-i, i)/sqrt2 projects onto +y" * doctest::should_fail()) {
  const double h = 1.0 / std::sqrt(2.0);
  const Sigma m = sigma({cplx{0.0, -h}, cplx{0.0, h}});
  CHECK(std::fabs(m.x) < 1e-12);
  CHECK(m.y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spin vector lies on the unit sphere and ignores global phase") {
  for (double beta = 0.0; beta < 6.3; beta += 0.7)
    for (double phi = -3.0; phi < 3.0; phi += 0.9) {
      const SpinState s = SpinState::from_bloch(0.4, beta, phi);
      const Sigma a = sigma(s);
      CHECK(a.x * a.x + a.y * a.y + a.z * a.z == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(a.x == doctest::Approx(std::sin(beta) * std::cos(phi)).scale(1.0).epsilon(1e-14));
      CHECK(a.y == doctest::Approx(std::sin(beta) * std::sin(phi)).scale(1.0).epsilon(1e-14));
      const cplx g = std::polar(1.7, 2.2);
      const Sigma b = sigma({g * s.a1, g * s.a2});
      CHECK(b.x == doctest::Approx(a.x).scale(1.0).epsilon(1e-14));
      CHECK(b.y == doctest::Approx(a.y).scale(1.0).epsilon(1e-14));
      CHECK(b.z == doctest::Approx(a.z).scale(1.0).epsilon(1e-14));
      CHECK(angular_momentum({g * s.a1, g * s.a2}, 1.0) ==
            doctest::Approx(angular_momentum(s, 1.0)).scale(1.0).epsilon(1e-14));
    }
}

TEST_CASE("energy proxy is flat over the real family") {
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i <= 1000; ++i) {
    const double w = SpinState::from_alpha(2.0 * kPi * i / 1000.0).weight();
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  CHECK(hi - lo <= 1e-12);
}

TEST_CASE("double covering along a closed Bloch path") {
  const MediumParams p;
  const double r = 0.5, th = 0.8, t = 0.007, phi = 0.6;
  const cplx start = superposed_field(SpinState::from_bloch(0.0, 0.0, phi), r, th, t, p.h0, p).xi;
  std::optional<BlochAngles> track = bloch_angles(SpinState::from_bloch(0.0, 0.0, phi));
  const Sigma s0 = sigma(SpinState::from_bloch(0.0, 0.0, phi));
  const int n = 128;
  for (int k = 1; k <= 2 * n; ++k) {
    const double beta = 2.0 * kPi * k / n;
    const SpinState s = SpinState::from_bloch(0.0, beta, phi);
    track = bloch_angles(s, track);
    CHECK(track->beta == doctest::Approx(beta).epsilon(1e-12));
    if (k == n) {
      const cplx xi = superposed_field(s, r, th, t, p.h0, p).xi;
      CHECK(std::abs(xi + start) <= 1e-14);
      const Sigma s1 = sigma(s);
      CHECK(s1.x == doctest::Approx(s0.x).scale(1.0).epsilon(1e-12));
      CHECK(s1.y == doctest::Approx(s0.y).scale(1.0).epsilon(1e-12));
      CHECK(s1.z == doctest::Approx(s0.z).scale(1.0).epsilon(1e-12));
    }
  }
  const cplx end = superposed_field(SpinState::from_bloch(0.0, 4.0 * kPi, phi), r, th, t, p.h0, p).xi;
  CHECK(std::abs(end - start) <= 1e-14);
  CHECK(track->beta == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("antisymmetric pair field") {
  const MediumParams p;
  const SpinState s = SpinState::from_alpha(0.3);
  const ComplexWave even = [&](Vec2 x, double t) {
    return cplx{standing_wave_height(norm(x), t, p), 0.0};
  };
  const ComplexWave spinning = [&](Vec2 x, double t) {
    return superposed_field(s, norm(x), std::atan2(x.y, x.x), t, p.h0, p).xi;
  };
  const Vec2 d{1.1, 0.4};
  for (double x = -1.0; x <= 2.0; x += 0.37)
    for (double y = -1.0; y <= 1.0; y += 0.41) {
      const Vec2 at{x, y};
      const double t = 0.009;
      // Exchanging the centres: the field built about B at d with A at 0.
      const cplx ab = antisymmetric_pair_field(spinning, d, at, t);
      const ComplexWave about_b = [&](Vec2 u, double tt) { return spinning(u - d, tt); };
      const cplx ba = antisymmetric_pair_field(about_b, Vec2{-d.x, -d.y}, at, t);
      CHECK(std::abs(ab + ba) <= 1e-15);
      CHECK(antisymmetric_pair_field(spinning, Vec2{}, at, t) == cplx{0.0, 0.0});
      // Mirror through the mid-plane perpendicular to d.
      const Vec2 mid = 0.5 * d;
      const double dd = dot(d, d);
      const Vec2 rel = at - mid;
      const Vec2 mirrored = mid + (rel - (2.0 * dot(rel, d) / dd) * d);
      CHECK(std::abs(antisymmetric_pair_field(even, d, mirrored, t) +
                     antisymmetric_pair_field(even, d, at, t)) <= 1e-15);
    }
}

TEST_CASE("pair boundary coupling") {
  const MediumParams p;
  CHECK(pair_boundary_coupling(0.25 * p.c, 0.3, p) == doctest::Approx(0.01875).epsilon(1e-14));
  CHECK(std::round(1.0 / pair_boundary_coupling(0.25 * p.c, 0.3, p)) == 53.0);
  CHECK(pair_boundary_coupling(0.0, 0.3, p) == 0.0);
  for (double f : {0.1, 0.5, 0.999}) CHECK(pair_boundary_coupling(f * p.c, 0.3, p) < 0.3);
  CHECK_THROWS_AS(pair_boundary_coupling(p.c, 0.3, p), DomainError);
}

TEST_CASE("far-field circulation falls off as 1/r") {
  const MediumParams p;
  std::vector<double> far, near;
  for (int i = 0; i <= 30; ++i) far.push_back(std::pow(10.0, 1.0 + i / 30.0) / p.k_r());
  for (int i = 1; i <= 10; ++i) near.push_back(0.2 * i / p.k_r());
  const CirculationFit a = far_field_circulation(1, far, p);
  CHECK(a.fit.slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(a.accepted);
  CHECK_FALSE(a.regime_warning);
  CHECK(a.sign == 1.0);
  const CirculationFit b = far_field_circulation(-1, far, p);
  CHECK(b.fit.slope == doctest::Approx(a.fit.slope).epsilon(1e-12));
  CHECK(b.sign == -1.0);
  const CirculationFit c = far_field_circulation(1, near, p);
  CHECK(c.regime_warning);
  CHECK_FALSE(c.accepted);
  CHECK_THROWS_AS(far_field_circulation(0, far, p), DomainError);
}
