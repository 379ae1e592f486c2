#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "dropsim/errors.hpp"
#include "dropsim/quantum.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> fft_wavenumbers(int n, double dx) {
  std::vector<double> k(n);
  const double base = 2.0 * kPi / (n * dx);
  for (int i = 0; i < n; ++i) k[i] = base * (i <= n / 2 ? i : i - n);
  return k;
}

// Constant-coefficient tridiagonal solve of (1 + i r) u_j - (i r / 2)(u_{j-1} + u_{j+1}) = d_j
// with zero walls; c' and 1/m are precomputed per length.
struct CrankNicolson {
  cplx diag, off;
  std::vector<cplx> cprime, inv_m;
  double r = 0.0;

  CrankNicolson() = default;
  CrankNicolson(int n, double r_) : r(r_) {
    diag = {1.0, r};
    off = {0.0, -0.5 * r};
    cprime.resize(n);
    inv_m.resize(n);
    cplx m = diag;
    for (int j = 0; j < n; ++j) {
      if (j > 0) m = diag - off * cprime[j - 1];
      inv_m[j] = 1.0 / m;
      cprime[j] = off * inv_m[j];
    }
  }

  // In-place on a strided line.
  void apply(cplx* u, int n, std::ptrdiff_t stride, std::vector<cplx>& work) const {
    work.resize(n);
    const cplx rhs_diag{1.0, -r};
    const cplx rhs_off{0.0, 0.5 * r};
    for (int j = 0; j < n; ++j) {
      cplx d = rhs_diag * u[j * stride];
      if (j > 0) d += rhs_off * u[(j - 1) * stride];
      if (j + 1 < n) d += rhs_off * u[(j + 1) * stride];
      work[j] = d;
    }
    work[0] *= inv_m[0];
    for (int j = 1; j < n; ++j) work[j] = (work[j] - off * work[j - 1]) * inv_m[j];
    for (int j = n - 2; j >= 0; --j) work[j] -= cprime[j] * work[j + 1];
    for (int j = 0; j < n; ++j) u[j * stride] = work[j];
  }
};

}  // namespace

struct SchrodingerPropagator::Impl {
  int nx = 0, ny = 1;
  double dt = 0.0;
  Boundary boundary = Boundary::Periodic;
  std::vector<cplx> half_potential;  // exp(-i V dt / (2 bbar)) with sponge decay
  std::vector<cplx> kinetic;         // periodic only, includes 1/N
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  CrankNicolson cn_x_half, cn_x_full, cn_y_full;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

SchrodingerPropagator::SchrodingerPropagator(const ComplexField& f, const PilotWaveParams& q)
    : impl_(std::make_unique<Impl>()) {
  if (!(f.dt > 0.0)) throw DomainError("schrodinger: dt must be positive");
  if (!(q.bbar > 0.0) || !(q.m0 > 0.0)) throw DomainError("schrodinger: bbar, m0 must be positive");
  Impl& m = *impl_;
  m.nx = f.nx;
  m.ny = f.ny;
  m.dt = f.dt;
  m.boundary = f.boundary;
  const std::size_t N = f.samples.size();

  const double x_lo = f.x(0), x_hi = f.x(f.nx - 1);
  const double y_lo = f.y(0), y_hi = f.y(f.ny - 1);
  auto sponge = [&](double x, double y) {
    if (f.boundary != Boundary::Absorbing || !(f.sponge_width > 0.0)) return 0.0;
    auto depth = [&](double u, double lo, double hi) {
      const double d = std::max(lo + f.sponge_width - u, u - (hi - f.sponge_width));
      return std::clamp(d / f.sponge_width, 0.0, 1.0);
    };
    double s = depth(x, x_lo, x_hi);
    if (f.ny > 1) s = std::max(s, depth(y, y_lo, y_hi));
    return f.sponge_strength * s * s;
  };

  double vmax = 0.0;
  m.half_potential.resize(N);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const double V = q.potential(f.x(i), f.y(j));
      if (!std::isfinite(V)) throw DomainError("schrodinger: potential is not finite");
      vmax = std::max(vmax, std::fabs(V));
      const double phase = -V * f.dt / (2.0 * q.bbar);
      const double decay = std::exp(-0.5 * sponge(f.x(i), f.y(j)) * f.dt);
      m.half_potential[static_cast<std::size_t>(j) * f.nx + i] = std::polar(decay, phase);
    }
  stability_limit_ = vmax > 0.0 ? kPi * q.bbar / vmax : std::numeric_limits<double>::infinity();

  const double D = q.diffusion();
  if (f.boundary == Boundary::Periodic) {
    const auto kx = fft_wavenumbers(f.nx, f.dx);
    const auto ky = f.ny > 1 ? fft_wavenumbers(f.ny, f.dx) : std::vector<double>{0.0};
    m.kinetic.resize(N);
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const double k2 = kx[i] * kx[i] + ky[j] * ky[j];
        m.kinetic[static_cast<std::size_t>(j) * f.nx + i] =
            std::polar(1.0 / static_cast<double>(N), -D * k2 * f.dt);
      }
    std::lock_guard lock(planner_mutex());
    m.buffer = fftw_alloc_complex(N);
    if (f.ny > 1) {
      m.forward = fftw_plan_dft_2d(f.ny, f.nx, m.buffer, m.buffer, FFTW_FORWARD, FFTW_ESTIMATE);
      m.backward = fftw_plan_dft_2d(f.ny, f.nx, m.buffer, m.buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      m.forward = fftw_plan_dft_1d(f.nx, m.buffer, m.buffer, FFTW_FORWARD, FFTW_ESTIMATE);
      m.backward = fftw_plan_dft_1d(f.nx, m.buffer, m.buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!m.forward || !m.backward) throw NumericError("schrodinger: FFT planning failed");
  } else {
    const double r = D * f.dt / (f.dx * f.dx);
    if (f.ny > 1) {
      m.cn_x_half = CrankNicolson(f.nx, 0.5 * r);
      m.cn_y_full = CrankNicolson(f.ny, r);
    } else {
      m.cn_x_full = CrankNicolson(f.nx, r);
    }
  }
}

SchrodingerPropagator::~SchrodingerPropagator() = default;

void SchrodingerPropagator::step(ComplexField& f) const {
  const Impl& m = *impl_;
  if (f.nx != m.nx || f.ny != m.ny) throw DomainError("schrodinger: field layout changed");
  if (f.dt != m.dt) throw DomainError("schrodinger: dt changed since the propagator was built");
  if (!(m.dt <= stability_limit_))
    throw NumericError("schrodinger: dt exceeds the stability limit of the potential step");

  const std::size_t N = f.samples.size();
  cplx* psi = f.samples.data();
  for (std::size_t k = 0; k < N; ++k) psi[k] *= m.half_potential[k];

  if (m.boundary == Boundary::Periodic) {
    auto* buf = reinterpret_cast<cplx*>(m.buffer);
    std::copy(psi, psi + N, buf);
    fftw_execute(m.forward);
    for (std::size_t k = 0; k < N; ++k) buf[k] *= m.kinetic[k];
    fftw_execute(m.backward);
    std::copy(buf, buf + N, psi);
  } else {
    std::vector<cplx> work;
    if (m.ny > 1) {
      for (int j = 0; j < m.ny; ++j) m.cn_x_half.apply(psi + std::size_t(j) * m.nx, m.nx, 1, work);
      for (int i = 0; i < m.nx; ++i) m.cn_y_full.apply(psi + i, m.ny, m.nx, work);
      for (int j = 0; j < m.ny; ++j) m.cn_x_half.apply(psi + std::size_t(j) * m.nx, m.nx, 1, work);
    } else {
      m.cn_x_full.apply(psi, m.nx, 1, work);
    }
  }

  for (std::size_t k = 0; k < N; ++k) psi[k] *= m.half_potential[k];
  f.t += f.dt;
  for (std::size_t k = 0; k < N; ++k)
    if (!std::isfinite(psi[k].real()) || !std::isfinite(psi[k].imag()))
      throw NumericError("schrodinger: field became non-finite");
}

ComplexField schrodinger_step(const ComplexField& field, const PilotWaveParams& q) {
  ComplexField out = field;
  SchrodingerPropagator(field, q).step(out);
  return out;
}

std::vector<BohmTrajectory> evolve_bohm_ensemble(ComplexField& f, const PilotWaveParams& q,
                                                 std::span<const Vec2> starts,
                                                 std::uint64_t seed, const EnsembleConfig& cfg) {
  if (cfg.steps < 0) throw DomainError("bohm ensemble: negative step count");
  const SchrodingerPropagator prop(f, q);
  const std::size_t n = starts.size();
  const bool periodic = f.boundary == Boundary::Periodic;
  const double lx = f.nx * f.dx, ly = f.ny * f.dx;

  std::vector<BohmTrajectory> out(n);
  std::vector<Vec2> pos(starts.begin(), starts.end());
  std::vector<Vec2> last(n);
  std::vector<char> frozen(n, 0);
  {
    const BohmGuide g(f, q);
    for (std::size_t k = 0; k < n; ++k) {
      out[k].seed = seed;
      out[k].positions.push_back(pos[k]);
      if (!g.contains(pos[k])) throw DomainError("bohm ensemble: start outside the lattice");
      last[k] = g.velocity(pos[k]).value_or(Vec2{});
    }
    for (std::size_t k = 0; k < n; ++k) {
      // |psi|^2 at the start, bilinear.
      const double s = f.dx;
      const double fx = (pos[k].x - f.x0) / s, fy = f.ny > 1 ? (pos[k].y - f.y0) / s : 0.0;
      int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy));
      auto wrap = [](int i, int nn) { return ((i % nn) + nn) % nn; };
      const double ax = fx - i0, ay = fy - j0;
      auto rho = [&](int i, int j) {
        return std::norm(f.at(wrap(i, f.nx), f.ny > 1 ? wrap(j, f.ny) : 0));
      };
      out[k].weight = (1 - ay) * ((1 - ax) * rho(i0, j0) + ax * rho(i0 + 1, j0)) +
                      ay * ((1 - ax) * rho(i0, j0 + 1) + ax * rho(i0 + 1, j0 + 1));
    }
  }

  auto wrap_pos = [&](Vec2 p) {
    if (!periodic) return p;
    auto w = [](double u, double lo, double len) {
      double s = std::fmod(u - lo, len);
      if (s < 0.0) s += len;
      return lo + s;
    };
    return Vec2{w(p.x, f.x0, lx), f.ny > 1 ? w(p.y, f.y0, ly) : p.y};
  };

  const double dt = f.dt;
  ComplexField prev = f;
  for (int s = 1; s <= cfg.steps; ++s) {
    prev.samples = f.samples;
    prev.t = f.t;
    const BohmGuide g0(prev, q);
    prop.step(f);
    const BohmGuide g1(f, q);

    auto advance = [&](std::size_t k) {
      if (frozen[k]) return;
      const Vec2 v0 = g0.velocity(pos[k]).value_or(last[k]);
      const Vec2 trial = wrap_pos(pos[k] + dt * v0);
      if (!g1.contains(trial)) {
        frozen[k] = 1;
        return;
      }
      const Vec2 v1 = g1.velocity(trial).value_or(v0);
      const Vec2 next = wrap_pos(pos[k] + (0.5 * dt) * (v0 + v1));
      if (!g1.contains(next)) {
        frozen[k] = 1;
        return;
      }
      pos[k] = next;
      last[k] = v1;
    };
    const long nn = static_cast<long>(n);
    if (cfg.parallel) {
#pragma omp parallel for schedule(static)
      for (long k = 0; k < nn; ++k) advance(static_cast<std::size_t>(k));
    } else {
      for (long k = 0; k < nn; ++k) advance(static_cast<std::size_t>(k));
    }
    const bool record = (cfg.record_every > 0 && s % cfg.record_every == 0) || s == cfg.steps;
    if (record)
      for (std::size_t k = 0; k < n; ++k) out[k].positions.push_back(pos[k]);
  }
  for (const BohmTrajectory& tr : out)
    for (const Vec2& p : tr.positions)
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw NumericError("bohm ensemble: non-finite trajectory");
  return out;
}

TunnellingResult tunnelling_sweep(std::span<const double> heights, std::span<const double> widths,
                                  const Packet& packet, const PilotWaveParams& q,
                                  const TunnellingGrid& grid, const FieldObserver& observer) {
  if (heights.empty() || widths.empty()) throw DomainError("tunnelling: empty sweep");
  if (!(packet.sigma > 0.0) || !(packet.k0 > 0.0)) throw DomainError("tunnelling: bad packet");
  if (!(packet.x0 <= -5.0 * packet.sigma))
    throw DomainError("tunnelling: packet must start at least 5 sigma before the barrier");
  if (grid.n < 16 || !(grid.length > 0.0) || !(grid.dt > 0.0))
    throw DomainError("tunnelling: bad grid");
  const double dx = grid.length / grid.n;
  const double x_lo = -0.5 * grid.length;
  const double D = q.diffusion();

  TunnellingResult result;
  result.packet_energy =
      q.bbar * D * (packet.k0 * packet.k0 + 1.0 / (4.0 * packet.sigma * packet.sigma));

  std::vector<double> hs(heights.begin(), heights.end());
  std::vector<double> ws(widths.begin(), widths.end());
  std::sort(hs.begin(), hs.end());
  std::sort(ws.begin(), ws.end());
  const double w_max = ws.back();
  if (!(ws.front() >= 0.0)) throw DomainError("tunnelling: widths must be non-negative");
  if (w_max - packet.x0 + 6.0 * packet.sigma > 0.5 * grid.length)
    throw DomainError("tunnelling: domain too short for the packet run");

  for (double h : hs) {
    if (h <= result.packet_energy) result.over_barrier = true;
    for (double w : ws) {
      // Cell-overlap barrier so the integrated width is exactly w.
      auto V = [h, w, dx](double x, double) {
        const double lo = std::max(x - 0.5 * dx, 0.0);
        const double hi = std::min(x + 0.5 * dx, w);
        return hi > lo ? h * (hi - lo) / dx : 0.0;
      };
      PilotWaveParams qb = q;
      qb.V = V;
      ComplexField f = ComplexField::make_1d(grid.n, dx, x_lo, Boundary::Periodic);
      f.dt = grid.dt;
      const double s2 = 4.0 * packet.sigma * packet.sigma;
      f.fill([&](double x, double) {
        const double u = x - packet.x0;
        return std::polar(std::exp(-u * u / s2), packet.k0 * x);
      });
      f.normalize();
      const SchrodingerPropagator prop(f, qb);
      const double vg = 2.0 * D * packet.k0;
      const double t_end = (2.0 * (-packet.x0) + w) / vg;
      const long steps = static_cast<long>(std::ceil(t_end / grid.dt));
      for (long s = 1; s <= steps; ++s) {
        prop.step(f);
        if (observer && grid.snapshot_every > 0 && s % grid.snapshot_every == 0) observer(f, h, w);
      }
      double T = 0.0;
      for (int i = 0; i < f.nx; ++i)
        if (f.x(i) >= w) T += std::norm(f.at(i));
      result.rows.push_back({h, w, T * dx});
    }
  }
  return result;
}

}  // namespace dropsim
