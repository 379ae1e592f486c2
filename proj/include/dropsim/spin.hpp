#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>

#include "dropsim/harness/fit.hpp"
#include "dropsim/wavefield.hpp"

namespace dropsim {

using cplx = std::complex<double>;

struct BlochAngles {
  double S = 0.0;     // global phase
  double beta = 0.0;  // polar angle, lifted (not folded mod 2 pi)
  double phi = 0.0;   // relative phase
};

/// Amplitudes of the m = +1 and m = -1 rotating modes.
struct SpinState {
  cplx a1{1.0, 0.0};
  cplx a2{0.0, 0.0};

  /// a1 = e^{iS} cos(beta/2), a2 = e^{iS} e^{i phi} sin(beta/2).
  static SpinState from_bloch(double S, double beta, double phi);
  /// The real family (cos alpha, sin alpha); beta = 2 alpha.
  static SpinState from_alpha(double alpha);

  /// |a1|^2 + |a2|^2, the energy proxy.
  double weight() const { return std::norm(a1) + std::norm(a2); }
  /// Throws DomainError for the zero state.
  void validate() const;
};

/// Inverse of from_bloch. Without a previous point the principal branch
/// beta in [0, pi] is returned. With one, the branch (beta -> +-beta + 2 pi n,
/// S and phi shifted to match) closest to the previous beta is chosen and S,
/// phi are unwrapped, so beta advances continuously along a path.
BlochAngles bloch_angles(const SpinState& s, const std::optional<BlochAngles>& previous = {});

/// Round trip through the angles; reproduces the input up to normalisation.
SpinState bloch_roundtrip(const SpinState& s);

enum class Axis { X, Y, Z };

/// (a* sigma_i a) / (a* a).
double spin_projection(const SpinState& s, Axis axis);

/// L0 (|a1|^2 - |a2|^2) / (|a1|^2 + |a2|^2).
double angular_momentum(const SpinState& s, double L0);

struct RotatingPair {
  double Omega = 0.0;
  double k1 = 0.0;  // c k1 = omega0 + Omega
  double k2 = 0.0;  // c k2 = omega0 - Omega
  double h0 = 0.0;

  /// Throws DomainError unless 0 <= Omega < omega0.
  static RotatingPair make(double Omega, double h0, const MediumParams& p);
};

enum class PairForm { Exact, Factored };

/// Exact: h0/2 [cos(w0 t + W t - th) J1(k1 r) + cos(w0 t - W t + th) J1(k2 r)].
/// Factored: h0 cos(w0 t) cos(W t - th) J1(k_r r), valid at small r and W.
double rotating_pair_height(const RotatingPair& pair, double r, double theta, double t,
                            const MediumParams& p, PairForm form = PairForm::Exact);

/// Trapezoidal integral over theta of h_m h_n at fixed (r, t), with h_m of
/// amplitude h0. The rule is exact for the trigonometric integrand.
double mode_overlap(int m, int n, double r, double t, double h0, const MediumParams& p);

struct SuperposedField {
  cplx xi;
  double height = 0.0;
  double energy_proxy = 0.0;
};

/// xi = e^{-i w0 t} (a1 chi_1 + a2 chi_-1), chi_m = h0 e^{i m th} J_m(k_r r).
SuperposedField superposed_field(const SpinState& s, double r, double theta, double t, double h0,
                                 const MediumParams& p);

using ComplexWave = std::function<cplx(Vec2 x, double t)>;

/// xi_a(x, t) - xi_a(x - d, t).
cplx antisymmetric_pair_field(const ComplexWave& xi_a, Vec2 d, Vec2 x, double t);

/// (v/c)^2 alpha1. Throws DomainError for |v| >= c.
double pair_boundary_coupling(double v, double alpha1, const MediumParams& p);

struct CirculationFit {
  FitResult fit;            // log |transport| against log r
  double sign = 0.0;        // sense of circulation, sign(m)
  bool regime_warning = false;  // some sample has k_r r < 10
  bool accepted = false;        // fit trusted only in the far field
};

/// Cycle- and wavelength-averaged azimuthal transport of the order-m mode,
/// proportional to the radial average of J_m(k_r r)^2, fitted on a log-log
/// scale. Vortex-like transport gives slope -1.
CirculationFit far_field_circulation(int m, std::span<const double> r_samples,
                                     const MediumParams& p);

inline constexpr double kFarFieldOnset = 10.0;

}  // namespace dropsim
