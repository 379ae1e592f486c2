#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "dropsim/errors.hpp"
#include "dropsim/quantum.hpp"
#include "dropsim/rng.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / std::numbers::pi;

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* p;
  explicit FftwBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* data() { return reinterpret_cast<cplx*>(p); }
};

// Fraction of the cell [y - h/2, y + h/2] inside the apertures.
double aperture(double y, double h, std::span<const double> centres, double width) {
  double open = 0.0;
  for (double c : centres) {
    const double lo = std::max(y - 0.5 * h, c - 0.5 * width);
    const double hi = std::min(y + 0.5 * h, c + 0.5 * width);
    if (hi > lo) open += hi - lo;
  }
  return std::min(open / h, 1.0);
}

}  // namespace

std::vector<double> slit_centres(const SlitGeometry& g) {
  if (g.kind == SlitKind::Single) return {0.0};
  return {-0.5 * g.separation, 0.5 * g.separation};
}

DiffractedField::DiffractedField(const SlitGeometry& geom, const DiffractionGrid& grid,
                                 double guidance, bool parallel)
    : grid_(grid), guidance_(guidance) {
  if (!(grid.wavelength > 0.0) || !(grid.dy > 0.0) || !(grid.dx_row > 0.0) || grid.ny < 16)
    throw DomainError("diffraction: bad grid");
  if (!(geom.width > 0.0)) throw DomainError("diffraction: slit width must be positive");
  if (geom.kind == SlitKind::Double && !(geom.separation > geom.width))
    throw DomainError("diffraction: slits overlap");
  if (!(grid.x_end > grid.x_start) || !(grid.x_start > 0.0))
    throw DomainError("diffraction: need 0 < x_start < x_end");
  if (!(2.0 * grid.y_keep < 0.5 * grid.ny * grid.dy))
    throw DomainError("diffraction: stored band too wide for the transverse period");

  const int ny = grid.ny;
  k_ = 2.0 * kPi / grid.wavelength;
  rows_ = static_cast<int>(std::floor((grid.x_end - grid.x_start) / grid.dx_row)) + 1;
  const int keep = static_cast<int>(std::floor(grid.y_keep / grid.dy));
  cols_ = 2 * keep + 1;
  y_first_ = -keep * grid.dy;
  const int j_first = ny / 2 - keep;  // transverse node j sits at y = (j - ny/2) dy

  // Aperture spectrum.
  const auto centres = slit_centres(geom);
  FftwBuffer spec(ny);
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(plan_mutex());
    FftwBuffer in(ny);
    fwd = fftw_plan_dft_1d(ny, in.p, spec.p, FFTW_FORWARD, FFTW_ESTIMATE);
    for (int j = 0; j < ny; ++j) in.data()[j] = aperture((j - ny / 2) * grid.dy, grid.dy, centres, geom.width);
    fftw_execute(fwd);
    bwd = fftw_plan_dft_1d(ny, in.p, spec.p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  std::vector<double> ky(ny);
  std::vector<cplx> kx(ny);
  for (int j = 0; j < ny; ++j) {
    ky[j] = 2.0 * kPi / (ny * grid.dy) * (j <= ny / 2 ? j : j - ny);
    const double d = k_ * k_ - ky[j] * ky[j];
    kx[j] = d >= 0.0 ? cplx{std::sqrt(d), 0.0} : cplx{0.0, std::sqrt(-d)};
  }
  const std::vector<cplx> A(spec.data(), spec.data() + ny);

  const std::size_t cells = static_cast<std::size_t>(rows_) * cols_;
  vx_.resize(cells);
  vy_.resize(cells);
  amp2_.resize(cells);

  auto row = [&](int r, FftwBuffer& in, FftwBuffer& psi, FftwBuffer& dpx, FftwBuffer& dpy,
                 std::vector<cplx>& E) {
    const double x = grid.x_start + r * grid.dx_row;
    const double scale = 1.0 / ny;
    E.resize(ny);
    for (int j = 0; j < ny; ++j) E[j] = A[j] * std::exp(cplx{0.0, 1.0} * kx[j] * x) * scale;
    std::copy(E.begin(), E.end(), in.data());
    fftw_execute_dft(bwd, in.p, psi.p);
    for (int j = 0; j < ny; ++j) in.data()[j] = E[j] * cplx{0.0, 1.0} * kx[j];
    fftw_execute_dft(bwd, in.p, dpx.p);
    for (int j = 0; j < ny; ++j) in.data()[j] = E[j] * cplx{0.0, ky[j]};
    fftw_execute_dft(bwd, in.p, dpy.p);
    const std::size_t base = static_cast<std::size_t>(r) * cols_;
    for (int c = 0; c < cols_; ++c) {
      const int j = j_first + c;
      const cplx p = psi.data()[j];
      const double a2 = std::norm(p);
      amp2_[base + c] = a2;
      if (a2 > 0.0) {
        vx_[base + c] = guidance_ * std::imag(std::conj(p) * dpx.data()[j]) / a2;
        vy_[base + c] = guidance_ * std::imag(std::conj(p) * dpy.data()[j]) / a2;
      } else {
        vx_[base + c] = vy_[base + c] = 0.0;
      }
    }
  };

  if (parallel) {
#pragma omp parallel
    {
      FftwBuffer in(ny), psi(ny), dpx(ny), dpy(ny);
      std::vector<cplx> E;
#pragma omp for schedule(static)
      for (int r = 0; r < rows_; ++r) row(r, in, psi, dpx, dpy, E);
    }
  } else {
    FftwBuffer in(ny), psi(ny), dpx(ny), dpy(ny);
    std::vector<cplx> E;
    for (int r = 0; r < rows_; ++r) row(r, in, psi, dpx, dpy, E);
  }
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  const double peak = *std::max_element(amp2_.begin(), amp2_.end());
  eps_ = kNodeEpsilon * kNodeEpsilon * peak;
}

bool DiffractedField::contains(Vec2 at) const {
  const double fx = (at.x - grid_.x_start) / grid_.dx_row;
  const double fy = (at.y - y_first_) / grid_.dy;
  return fx >= 0.0 && fx <= rows_ - 1 && fy >= 0.0 && fy <= cols_ - 1;
}

std::optional<Vec2> DiffractedField::velocity(Vec2 at) const {
  if (!contains(at)) throw DomainError("diffracted field: point outside the stored band");
  const double fx = (at.x - grid_.x_start) / grid_.dx_row;
  const double fy = (at.y - y_first_) / grid_.dy;
  const int r = std::min(static_cast<int>(fx), rows_ - 2);
  const int c = std::min(static_cast<int>(fy), cols_ - 2);
  const double ax = fx - r, ay = fy - c;
  const std::size_t k00 = static_cast<std::size_t>(r) * cols_ + c;
  const std::size_t k10 = k00 + cols_;
  auto mix = [&](const std::vector<double>& v) {
    return (1 - ax) * ((1 - ay) * v[k00] + ay * v[k00 + 1]) +
           ax * ((1 - ay) * v[k10] + ay * v[k10 + 1]);
  };
  if (mix(amp2_) <= eps_) return std::nullopt;
  return Vec2{mix(vx_), mix(vy_)};
}

double DiffractedField::intensity(Vec2 at) const {
  if (!contains(at)) throw DomainError("diffracted field: point outside the stored band");
  const double fx = (at.x - grid_.x_start) / grid_.dx_row;
  const double fy = (at.y - y_first_) / grid_.dy;
  const int r = std::min(static_cast<int>(fx), rows_ - 2);
  const int c = std::min(static_cast<int>(fy), cols_ - 2);
  const double ax = fx - r, ay = fy - c;
  const std::size_t k00 = static_cast<std::size_t>(r) * cols_ + c;
  const std::size_t k10 = k00 + cols_;
  return (1 - ax) * ((1 - ay) * amp2_[k00] + ay * amp2_[k00 + 1]) +
         ax * ((1 - ay) * amp2_[k10] + ay * amp2_[k10 + 1]);
}

std::vector<DropletOutcome> guide_droplets(const DiffractedField& field, const SlitGeometry& geom,
                                           const DropletRun& run) {
  if (run.n == 0) throw DomainError("guide_droplets: no droplets");
  if (!(run.memory > 0.0) || !(run.tau > 0.0)) throw DomainError("guide_droplets: M, tau > 0");
  if (!(run.entry_margin >= 0.0)) throw DomainError("guide_droplets: negative entry margin");
  const DiffractionGrid& grid = field.grid();
  if (!(run.exit_radius > grid.x_start) || run.exit_radius > grid.x_end ||
      run.exit_radius > grid.y_keep)
    throw DomainError("guide_droplets: exit circle must lie inside the stored field");

  // Entry band: every aperture plus the fringe flux beside it.
  const auto centres = slit_centres(geom);
  const auto [c_lo, c_hi] = std::minmax_element(centres.begin(), centres.end());
  const double band_lo = *c_lo - 0.5 * geom.width - run.entry_margin;
  const double band = (*c_hi - *c_lo) + geom.width + 2.0 * run.entry_margin;
  const double v_free = field.free_speed();
  const double hop = 0.25 * std::min(grid.dx_row, grid.dy);
  const double keep_bounce = std::exp(-1.0 / run.memory);

  std::vector<DropletOutcome> out(run.n);
  auto fly = [&](std::size_t i) {
    Philox rng(run.seed, i);
    const double u = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(run.n);
    Vec2 pos{grid.x_start, band_lo + u * band};
    Vec2 v{v_free, 0.0};
    DropletOutcome res;
    {
      const auto v0 = field.velocity(pos);
      res.weight = v0 ? std::max(0.0, field.intensity(pos) * v0->x) : 0.0;
    }
    for (long b = 0; b < run.max_bounces; ++b) {
      // Relax towards the guidance velocity; subdivide long hops near nodes.
      const auto vb = field.velocity(pos);
      const Vec2 target = vb.value_or(v);
      const Vec2 v_next = keep_bounce * v + (1.0 - keep_bounce) * target;
      const int sub = std::clamp(static_cast<int>(std::ceil(norm(v_next) * run.tau / hop)), 1, 64);
      if (sub == 1) {
        v = v_next;
        pos = pos + run.tau * v;
      } else {
        const double keep = std::exp(-1.0 / (run.memory * sub));
        for (int s = 0; s < sub && field.contains(pos); ++s) {
          const Vec2 t = field.velocity(pos).value_or(v);
          v = keep * v + (1.0 - keep) * t;
          pos = pos + (run.tau / sub) * v;
        }
      }
      if (norm(pos) >= run.exit_radius) {
        res.exited = true;
        res.angle_deg = std::atan2(pos.y, pos.x) * kDeg;
        break;
      }
      if (!field.contains(pos)) break;
    }
    out[i] = res;
  };

  const long n = static_cast<long>(run.n);
  if (run.parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < n; ++i) fly(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < n; ++i) fly(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace dropsim
