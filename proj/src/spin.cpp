#include "dropsim/spin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dropsim/bessel.hpp"
#include "dropsim/errors.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unwrap_near(double value, double target) {
  return value + kTwoPi * std::round((target - value) / kTwoPi);
}

}  // namespace

SpinState SpinState::from_bloch(double S, double beta, double phi) {
  const cplx g = std::polar(1.0, S);
  return {g * std::cos(0.5 * beta), g * std::polar(1.0, phi) * std::sin(0.5 * beta)};
}

SpinState SpinState::from_alpha(double alpha) { return {std::cos(alpha), std::sin(alpha)}; }

void SpinState::validate() const {
  if (!(weight() > 0.0) || !std::isfinite(weight()))
    throw DomainError("spin state: amplitudes must be finite and not both zero");
}

BlochAngles bloch_angles(const SpinState& s, const std::optional<BlochAngles>& previous) {
  s.validate();
  const double n = std::sqrt(s.weight());
  const double c = std::abs(s.a1) / n;
  const double sn = std::abs(s.a2) / n;
  const double beta0 = 2.0 * std::atan2(sn, c);
  // With a mode absent its phase is free; borrow the other one's.
  const double p1 = c > 0.0 ? std::arg(s.a1) : (previous ? previous->S : std::arg(s.a2));
  const double p2 = sn > 0.0 ? std::arg(s.a2) : p1 + (previous ? previous->phi : 0.0);

  if (!previous) return {p1, beta0, unwrap_near(p2 - p1, 0.0)};

  // beta = sigma beta0 + 2 pi m gives cos(beta/2) = (-1)^m c and
  // sin(beta/2) = sigma (-1)^m sn; S and phi absorb the signs. Through a
  // pole the two beta branches tie, and continuity of S and phi decides.
  double best_beta = beta0, best_S = p1, best_phi = p2 - p1;
  double best_gap = INFINITY;
  const double m_mid = std::round(previous->beta / kTwoPi);
  for (int sigma : {1, -1})
    for (double m = m_mid - 1; m <= m_mid + 1; m += 1.0) {
      const double beta = sigma * beta0 + kTwoPi * m;
      const double S = p1 + kPi * m;
      const double phi = p2 - S + (sigma < 0 ? kPi : 0.0) + kPi * m;
      const double gap = std::fabs(beta - previous->beta) +
                         std::fabs(unwrap_near(S, previous->S) - previous->S) +
                         std::fabs(unwrap_near(phi, previous->phi) - previous->phi);
      if (gap < best_gap) {
        best_gap = gap;
        best_beta = beta;
        best_S = S;
        best_phi = phi;
      }
    }
  return {unwrap_near(best_S, previous->S), best_beta, unwrap_near(best_phi, previous->phi)};
}

SpinState bloch_roundtrip(const SpinState& s) {
  const BlochAngles a = bloch_angles(s);
  const double n = std::sqrt(s.weight());
  const SpinState u = SpinState::from_bloch(a.S, a.beta, a.phi);
  return {n * u.a1, n * u.a2};
}

double spin_projection(const SpinState& s, Axis axis) {
  s.validate();
  const cplx i{0.0, 1.0};
  cplx num;
  switch (axis) {
    case Axis::X: num = std::conj(s.a1) * s.a2 + std::conj(s.a2) * s.a1; break;
    case Axis::Y: num = std::conj(s.a1) * (-i * s.a2) + std::conj(s.a2) * (i * s.a1); break;
    case Axis::Z: num = std::norm(s.a1) - std::norm(s.a2); break;
  }
  return num.real() / s.weight();
}

double angular_momentum(const SpinState& s, double L0) {
  s.validate();
  return L0 * (std::norm(s.a1) - std::norm(s.a2)) / s.weight();
}

RotatingPair RotatingPair::make(double Omega, double h0, const MediumParams& p) {
  if (!(Omega >= 0.0 && Omega < p.omega0))
    throw DomainError("rotating pair: need 0 <= Omega < omega0");
  return {Omega, (p.omega0 + Omega) / p.c, (p.omega0 - Omega) / p.c, h0};
}

double rotating_pair_height(const RotatingPair& pair, double r, double theta, double t,
                            const MediumParams& p, PairForm form) {
  if (!(r >= 0.0)) throw DomainError("rotating_pair_height: r must be non-negative");
  const double w0t = p.omega0 * t;
  const double Wt = pair.Omega * t;
  if (form == PairForm::Factored)
    return pair.h0 * std::cos(w0t) * std::cos(Wt - theta) * bessel_j(1, p.k_r() * r);
  return 0.5 * pair.h0 *
         (std::cos(w0t + Wt - theta) * bessel_j(1, pair.k1 * r) +
          std::cos(w0t - Wt + theta) * bessel_j(1, pair.k2 * r));
}

double mode_overlap(int m, int n, double r, double t, double h0, const MediumParams& p) {
  constexpr int kNodes = 256;
  const WaveSource sm{{}, 0.0, {}, h0, m, 0.0};
  const WaveSource sn{{}, 0.0, {}, h0, n, 0.0};
  double sum = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double th = kTwoPi * k / kNodes;
    sum += rotating_mode_height(sm, r, th, t, p) * rotating_mode_height(sn, r, th, t, p);
  }
  return sum * kTwoPi / kNodes;
}

SuperposedField superposed_field(const SpinState& s, double r, double theta, double t, double h0,
                                 const MediumParams& p) {
  s.validate();
  const double kr = p.k_r() * r;
  const cplx chi1 = h0 * std::polar(1.0, theta) * bessel_j_signed(1, kr);
  const cplx chim1 = h0 * std::polar(1.0, -theta) * bessel_j_signed(-1, kr);
  const cplx xi = std::polar(1.0, -p.omega0 * t) * (s.a1 * chi1 + s.a2 * chim1);
  return {xi, xi.real(), s.weight()};
}

cplx antisymmetric_pair_field(const ComplexWave& xi_a, Vec2 d, Vec2 x, double t) {
  return xi_a(x, t) - xi_a(x - d, t);
}

double pair_boundary_coupling(double v, double alpha1, const MediumParams& p) {
  if (!(std::fabs(v) < p.c)) throw DomainError("pair_boundary_coupling: |v| >= c");
  const double b = v / p.c;
  return b * b * alpha1;
}

CirculationFit far_field_circulation(int m, std::span<const double> r_samples,
                                     const MediumParams& p) {
  if (m == 0) throw DomainError("far_field_circulation: m = 0 carries no circulation");
  if (r_samples.size() < 3) throw DomainError("far_field_circulation: need at least 3 radii");
  const double k = p.k_r();
  const double lambda = kTwoPi / k;
  CirculationFit out;
  out.sign = m > 0 ? 1.0 : -1.0;
  std::vector<double> lr, lq;
  for (double r : r_samples) {
    if (!(r > 0.0)) throw DomainError("far_field_circulation: radii must be positive");
    if (k * r < kFarFieldOnset) out.regime_warning = true;
    // Simpson average of J_m^2 over one radial wavelength around r,
    // narrowed to r itself close to the centre.
    constexpr int kPanels = 256;
    const double width = std::min(lambda, r);
    const double a = r - 0.5 * width;
    const double h = width / kPanels;
    double s = 0.0;
    for (int i = 0; i <= kPanels; ++i) {
      const double j = bessel_j_signed(m, k * (a + i * h));
      const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * j * j;
    }
    const double transport = s * h / 3.0 / width;
    lr.push_back(std::log(r));
    lq.push_back(std::log(transport));
  }
  out.fit = fit_line(lr, lq);
  out.accepted = !out.regime_warning;
  return out;
}

}  // namespace dropsim
