#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dropsim/wavefield.hpp"

namespace dropsim {

using cplx = std::complex<double>;

/// bbar, m0 and the potential of the slowly varying envelope psi_s.
/// The Schrodinger coefficient bbar / (2 m0) is c^2 / (2 omega0) by
/// construction, whatever m0 is chosen.
struct PilotWaveParams {
  double bbar = 0.0;  // g mm^2/s
  double m0 = 0.0;    // g
  double omega0 = 0.0;
  double c = 0.0;
  std::function<double(double x, double y)> V;  // empty -> 0

  static PilotWaveParams make(double m0, const MediumParams& p,
                              std::function<double(double, double)> V = {});

  double potential(double x, double y) const { return V ? V(x, y) : 0.0; }
  /// bbar omega = m0 c^2 - V.
  double energy(double x, double y) const { return m0 * c * c - potential(x, y); }
  double diffusion() const { return bbar / (2.0 * m0); }  // mm^2/s
  double guidance() const { return c * c / omega0; }      // bbar / m0
};

struct PilotWave {
  double k = 0.0;      // 1/mm
  double omega = 0.0;  // rad/s
};

/// k = gamma omega0 v / c^2, omega = gamma omega0. Throws DomainError for |v| >= c.
PilotWave pilot_wavenumber(double vx, const MediumParams& p);

struct DeBroglie {
  double lambda = 0.0;    // mm, +inf for a droplet at rest
  double momentum = 0.0;  // gamma m0 v
  double b = 0.0;         // 2 pi bbar
  bool infinite = false;
};

/// lambda = 2 pi c^2 / (omega v). v = 0 is the infinite-wavelength case;
/// negative or superluminal speeds throw DomainError.
DeBroglie de_broglie_wavelength(double vx, const PilotWaveParams& q);

/// asin(lambda / L) in degrees, or nullopt when lambda > L.
std::optional<double> single_slit_first_minimum(double lambda, double L);
/// asin(lambda / (2 d)) in degrees, or nullopt when lambda > 2 d.
std::optional<double> double_slit_first_minimum(double lambda, double d);

enum class SlitKind { Single, Double };

/// Fraunhofer intensity normalised to 1 at theta = 0; angles in degrees.
std::vector<double> far_field_intensity(SlitKind kind, double lambda, double L, double d,
                                        std::span<const double> theta_deg);

enum class Boundary { Periodic, Reflecting, Absorbing };

/// psi_s on a square-cell lattice, row-major with x fastest. ny = 1 is 1D.
struct ComplexField {
  int nx = 0;
  int ny = 1;
  double dx = 1.0;  // mm, both directions
  double dt = 0.0;  // s
  double x0 = 0.0;  // position of sample (0, 0)
  double y0 = 0.0;
  double t = 0.0;
  Boundary boundary = Boundary::Periodic;
  double sponge_width = 0.0;     // mm, absorbing boundary only
  double sponge_strength = 0.0;  // peak absorption rate, 1/s
  std::vector<cplx> samples;

  static ComplexField make_1d(int nx, double dx, double x0, Boundary b);
  static ComplexField make_2d(int nx, int ny, double dx, double x0, double y0, Boundary b);

  int dims() const { return ny > 1 ? 2 : 1; }
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dx; }
  cplx& at(int i, int j = 0) { return samples[static_cast<std::size_t>(j) * nx + i]; }
  const cplx& at(int i, int j = 0) const { return samples[static_cast<std::size_t>(j) * nx + i]; }
  double cell() const { return dims() == 2 ? dx * dx : dx; }

  /// sum |psi|^2 dx^d.
  double norm() const;
  void normalize();
  /// Fills samples from f(x, y).
  void fill(const std::function<cplx(double, double)>& f);
};

/// <stem>.bin holds row-major little-endian (re, im) float64 pairs;
/// <stem>.hdr is a key = value text header with dims, dx, dt and t.
void write_snapshot(const ComplexField& f, const std::filesystem::path& stem);
ComplexField read_snapshot(const std::filesystem::path& stem);

/// Advances i bbar psi_t = (-bbar^2/(2 m0) lap + V) psi. Periodic fields
/// use Strang split-operator stepping with FFTs; reflecting and absorbing
/// fields use the same splitting with Crank-Nicolson sweeps per direction
/// between zero-valued walls. Absorbing fields add a quadratic
/// imaginary-potential sponge of the field's sponge width.
class SchrodingerPropagator {
 public:
  SchrodingerPropagator(const ComplexField& layout, const PilotWaveParams& q);
  ~SchrodingerPropagator();
  SchrodingerPropagator(const SchrodingerPropagator&) = delete;
  SchrodingerPropagator& operator=(const SchrodingerPropagator&) = delete;

  /// One dt. Throws NumericError if dt exceeds stability_limit().
  void step(ComplexField& f) const;
  /// Potential phase per step must stay below pi: dt <= pi bbar / max|V|.
  double stability_limit() const { return stability_limit_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double stability_limit_ = 0.0;
};

/// Single step with a throwaway propagator.
ComplexField schrodinger_step(const ComplexField& field, const PilotWaveParams& q);

/// RMS over interior nodes of psi_tt - c^2 lap psi + omega0^2 psi, with
/// centred differences over three time levels spaced by curr.dt.
double klein_gordon_residual(const ComplexField& prev, const ComplexField& curr,
                             const ComplexField& next, const MediumParams& p);

/// |psi_tt| / |2 omega0 psi_t| from three levels: the size of the term
/// dropped in going from the wave equation to the Schrodinger form.
double dropped_term_ratio(const ComplexField& prev, const ComplexField& curr,
                          const ComplexField& next, double omega0);

/// Node threshold relative to max |psi|.
inline constexpr double kNodeEpsilon = 1e-8;

/// Guidance velocity (c^2/omega0) grad(arg psi) on the lattice nodes, with
/// the phase gradient taken as arg(psi_{i+1} conj(psi_{i-1})) / (2 dx), which
/// never crosses a branch cut. Off-node values are bilinear.
class BohmGuide {
 public:
  BohmGuide(const ComplexField& f, const PilotWaveParams& q);
  /// nullopt when |psi| at the point is within the node threshold.
  std::optional<Vec2> velocity(Vec2 at) const;
  bool contains(Vec2 at) const;

 private:
  ComplexField field_;
  double eps_ = 0.0;
  std::vector<double> vx_, vy_;
};

/// Throws NodeError at nodes and DomainError outside the lattice.
Vec2 bohm_velocity(const ComplexField& f, Vec2 at, const PilotWaveParams& q);

/// RMS over interior nodes of (|psi1|^2 - |psi0|^2)/dt + div j with
/// j = (bbar/m0) Im(conj(psi) grad psi) averaged over the two levels.
double continuity_residual(const ComplexField& f0, const ComplexField& f1,
                           const PilotWaveParams& q);

struct BohmTrajectory {
  std::vector<Vec2> positions;
  std::uint64_t seed = 0;
  double weight = 1.0;  // |psi|^2 at the start
};

/// Positions drawn from |psi|^2, uniform within each lattice cell; draw i
/// uses Philox stream (seed, i).
std::vector<Vec2> sample_density(const ComplexField& f, std::size_t n, std::uint64_t seed);

struct EnsembleConfig {
  int steps = 500;
  int record_every = 0;  // 0 -> first and last position only
  bool parallel = true;
};

/// Evolves the field and carries the trajectories along with Heun steps
/// through consecutive guides. At nodes a trajectory reuses its previous
/// velocity. The field is left at its final time.
std::vector<BohmTrajectory> evolve_bohm_ensemble(ComplexField& f, const PilotWaveParams& q,
                                                 std::span<const Vec2> starts,
                                                 std::uint64_t seed, const EnsembleConfig& cfg);

struct Packet {
  double x0 = -90.0;   // mm
  double sigma = 15.0;  // std of |psi|^2, mm
  double k0 = 1.0;      // 1/mm
};

struct TunnellingGrid {
  int n = 8192;
  double length = 600.0;  // mm, periodic, barrier starts at x = 0
  double dt = 0.02;       // s
  int snapshot_every = 0; // steps between observer calls, 0 -> never
};

/// Sees the field during a sweep: (field, barrier height, barrier width).
using FieldObserver = std::function<void(const ComplexField&, double, double)>;

struct TunnellingRow {
  double height = 0.0;
  double width = 0.0;
  double transmission = 0.0;
};

struct TunnellingResult {
  std::vector<TunnellingRow> rows;  // sorted by (height, width)
  double packet_energy = 0.0;       // bbar D k0^2
  bool over_barrier = false;        // some height <= packet energy
};

/// Sends the packet at each rectangular barrier [0, w] and integrates
/// |psi|^2 beyond the barrier once the transmitted centre has travelled
/// as far past it as the packet started in front of it.
TunnellingResult tunnelling_sweep(std::span<const double> heights, std::span<const double> widths,
                                  const Packet& packet, const PilotWaveParams& q,
                                  const TunnellingGrid& grid = {},
                                  const FieldObserver& observer = {});

struct SlitGeometry {
  SlitKind kind = SlitKind::Single;
  double width = 14.8;       // mm, each slit
  double separation = 14.3;  // mm, centre to centre (double slit)
};

struct DiffractionGrid {
  double wavelength = 7.3;  // mm
  int ny = 4096;            // transverse FFT size
  double dy = 7.3 / 16.0;
  double x_start = 7.3;     // first stored row, mm behind the screen
  double x_end = 260.0;
  double dx_row = 0.5;
  double y_keep = 260.0;    // stored half-width
};

/// Steady diffracted wave behind a screen at x = 0, by angular-spectrum
/// propagation of a unit plane wave through the aperture. Stores the
/// guidance velocity and |psi|^2 for x in [x_start, x_end].
class DiffractedField {
 public:
  DiffractedField(const SlitGeometry& geom, const DiffractionGrid& grid, double guidance,
                  bool parallel = true);

  bool contains(Vec2 at) const;
  /// nullopt at nodes of |psi|.
  std::optional<Vec2> velocity(Vec2 at) const;
  double intensity(Vec2 at) const;
  /// Free-space guidance speed (c^2/omega0) k.
  double free_speed() const { return guidance_ * k_; }
  const DiffractionGrid& grid() const { return grid_; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::span<const double> vx() const { return vx_; }
  std::span<const double> vy() const { return vy_; }

 private:
  DiffractionGrid grid_;
  double guidance_ = 0.0;
  double k_ = 0.0;
  int rows_ = 0;
  int cols_ = 0;
  double y_first_ = 0.0;
  double eps_ = 0.0;
  std::vector<double> vx_, vy_, amp2_;
};

/// Aperture centres of the geometry.
std::vector<double> slit_centres(const SlitGeometry& g);

struct DropletRun {
  std::size_t n = 50000;
  std::uint64_t seed = 1;
  double memory = 20.0;  // M, bounces
  double tau = 0.04;     // bounce period, s
  double exit_radius = 250.0;
  double entry_margin = 21.9;  // mm added beside the outer slit edges
  long max_bounces = 200000;
  bool parallel = true;
};

struct DropletOutcome {
  double angle_deg = 0.0;  // signed, from the screen normal
  double weight = 0.0;     // x-flux of the diffracted wave at the start
  bool exited = false;
};

/// Walkers enter at x_start on jittered strata spanning the slits widened
/// by entry_margin on each side, weighted by the x-flux they start in.
/// Each bounce the velocity relaxes towards the local guidance velocity
/// with factor exp(-1/M), then the walker moves tau v. Exit angle is the
/// polar angle of the position on the exit circle.
std::vector<DropletOutcome> guide_droplets(const DiffractedField& field, const SlitGeometry& geom,
                                           const DropletRun& run);

}  // namespace dropsim
