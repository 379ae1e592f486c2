#include "dropsim/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "dropsim/errors.hpp"
#include "dropsim/rng.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::Reflecting: return "reflecting";
    case Boundary::Absorbing: return "absorbing";
  }
  return "?";
}

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "reflecting") return Boundary::Reflecting;
  if (s == "absorbing") return Boundary::Absorbing;
  throw ConfigError("snapshot header: unknown boundary '" + s + "'");
}

// Neighbour index along one axis; -1 when it falls off a walled lattice.
int neighbour(int i, int d, int n, bool periodic) {
  const int k = i + d;
  if (k >= 0 && k < n) return k;
  if (!periodic) return -1;
  return (k + n) % n;
}

// arg(psi(i+1)/psi(i-1)) / (2 dx), one-sided at walls.
double phase_gradient(const ComplexField& f, int i, int j, bool along_x) {
  const bool per = f.boundary == Boundary::Periodic;
  const int n = along_x ? f.nx : f.ny;
  const int c = along_x ? i : j;
  int hi = neighbour(c, 1, n, per);
  int lo = neighbour(c, -1, n, per);
  double span = 2.0 * f.dx;
  if (hi < 0) { hi = c; span = f.dx; }
  if (lo < 0) { lo = c; span = f.dx; }
  const cplx a = along_x ? f.at(hi, j) : f.at(i, hi);
  const cplx b = along_x ? f.at(lo, j) : f.at(i, lo);
  return std::arg(a * std::conj(b)) / span;
}

void require_same_layout(const ComplexField& a, const ComplexField& b, const char* what) {
  if (a.nx != b.nx || a.ny != b.ny || a.dx != b.dx)
    throw DomainError(std::string(what) + ": fields have different layouts");
}

// Interior range along an axis leaving `margin` nodes at walled edges.
std::pair<int, int> interior(int n, int margin, bool periodic) {
  if (n == 1) return {0, 1};
  return periodic ? std::pair{0, n} : std::pair{margin, n - margin};
}

struct Bilinear {
  int i0, i1, j0, j1;
  double fx, fy;
};

// Locates a point on the lattice; nullopt outside a walled lattice.
std::optional<Bilinear> locate(const ComplexField& f, Vec2 at) {
  const bool per = f.boundary == Boundary::Periodic;
  auto axis = [&](double u, int n, int& lo, int& hi, double& frac) {
    if (n == 1) {
      lo = hi = 0;
      frac = 0.0;
      return true;
    }
    double s = u / f.dx;
    if (per) {
      s = std::fmod(s, static_cast<double>(n));
      if (s < 0.0) s += n;
      lo = std::min(static_cast<int>(s), n - 1);
      hi = (lo + 1) % n;
      frac = s - lo;
      return true;
    }
    if (!(s >= 0.0 && s <= n - 1)) return false;
    lo = std::min(static_cast<int>(s), n - 2);
    hi = lo + 1;
    frac = s - lo;
    return true;
  };
  Bilinear b{};
  if (!axis(at.x - f.x0, f.nx, b.i0, b.i1, b.fx)) return std::nullopt;
  if (!axis(at.y - f.y0, f.ny, b.j0, b.j1, b.fy)) return std::nullopt;
  return b;
}

template <class T, class Get>
T blend(const Bilinear& b, Get get) {
  return (1.0 - b.fy) * ((1.0 - b.fx) * get(b.i0, b.j0) + b.fx * get(b.i1, b.j0)) +
         b.fy * ((1.0 - b.fx) * get(b.i0, b.j1) + b.fx * get(b.i1, b.j1));
}

}  // namespace

PilotWaveParams PilotWaveParams::make(double m0, const MediumParams& p,
                                      std::function<double(double, double)> V) {
  if (!(m0 > 0.0)) throw DomainError("pilot wave: m0 must be positive");
  p.validate();
  return {m0 * p.c * p.c / p.omega0, m0, p.omega0, p.c, std::move(V)};
}

PilotWave pilot_wavenumber(double vx, const MediumParams& p) {
  const BoostedFrame frame = BoostedFrame::make(vx, p.c);
  return {frame.gamma * p.omega0 * vx / (p.c * p.c), frame.gamma * p.omega0};
}

DeBroglie de_broglie_wavelength(double vx, const PilotWaveParams& q) {
  if (!(vx >= 0.0)) throw DomainError("de_broglie_wavelength: v_x must be non-negative");
  const double b = 2.0 * kPi * q.bbar;
  if (vx == 0.0) return {std::numeric_limits<double>::infinity(), 0.0, b, true};
  const BoostedFrame frame = BoostedFrame::make(vx, q.c);
  const double omega = frame.gamma * q.omega0;
  return {2.0 * kPi * q.c * q.c / (omega * vx), frame.gamma * q.m0 * vx, b, false};
}

std::optional<double> single_slit_first_minimum(double lambda, double L) {
  if (!(lambda > 0.0) || !(L > 0.0)) throw DomainError("slit: lambda and L must be positive");
  if (lambda > L) return std::nullopt;
  return std::asin(lambda / L) * kDeg;
}

std::optional<double> double_slit_first_minimum(double lambda, double d) {
  if (!(lambda > 0.0) || !(d > 0.0)) throw DomainError("slit: lambda and d must be positive");
  if (lambda > 2.0 * d) return std::nullopt;
  return std::asin(lambda / (2.0 * d)) * kDeg;
}

std::vector<double> far_field_intensity(SlitKind kind, double lambda, double L, double d,
                                        std::span<const double> theta_deg) {
  if (!(lambda > 0.0) || !(L > 0.0)) throw DomainError("far field: lambda and L must be positive");
  if (kind == SlitKind::Double && !(d > 0.0)) throw DomainError("far field: d must be positive");
  std::vector<double> out;
  out.reserve(theta_deg.size());
  for (double th : theta_deg) {
    const double s = std::sin(th / kDeg);
    const double env = sinc(kPi * L * s / lambda);
    double I = env * env;
    if (kind == SlitKind::Double) {
      const double c = std::cos(kPi * d * s / lambda);
      I *= c * c;
    }
    out.push_back(I);
  }
  return out;
}

ComplexField ComplexField::make_1d(int nx, double dx, double x0, Boundary b) {
  return make_2d(nx, 1, dx, x0, 0.0, b);
}

ComplexField ComplexField::make_2d(int nx, int ny, double dx, double x0, double y0, Boundary b) {
  if (nx < 3 || ny < 1 || (ny > 1 && ny < 3)) throw DomainError("field: need at least 3 nodes per axis");
  if (!(dx > 0.0)) throw DomainError("field: dx must be positive");
  ComplexField f;
  f.nx = nx;
  f.ny = ny;
  f.dx = dx;
  f.x0 = x0;
  f.y0 = y0;
  f.boundary = b;
  f.samples.assign(static_cast<std::size_t>(nx) * ny, cplx{});
  return f;
}

double ComplexField::norm() const {
  // Row sums then rows in order: fixed summation order.
  double total = 0.0;
  for (int j = 0; j < ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < nx; ++i) row += std::norm(at(i, j));
    total += row;
  }
  return total * cell();
}

void ComplexField::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericError("normalize: zero or non-finite norm");
  const double s = 1.0 / std::sqrt(n);
  for (cplx& v : samples) v *= s;
}

void ComplexField::fill(const std::function<cplx(double, double)>& f) {
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) at(i, j) = f(x(i), y(j));
}

void write_snapshot(const ComplexField& f, const std::filesystem::path& stem) {
  std::filesystem::path bin = stem;
  bin += ".bin";
  std::filesystem::path hdr = stem;
  hdr += ".hdr";
  {
    std::ofstream out(bin, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + bin.string());
    for (const cplx& v : f.samples) {
      for (double part : {v.real(), v.imag()}) {
        std::uint64_t u = std::bit_cast<std::uint64_t>(part);
        if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
        char bytes[8];
        for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((u >> (8 * k)) & 0xFF);
        out.write(bytes, 8);
      }
    }
  }
  std::ofstream out(hdr);
  if (!out) throw ConfigError("cannot write " + hdr.string());
  out << std::setprecision(17);
  out << "format = dropsim-field-1\n"
      << "nx = " << f.nx << "\nny = " << f.ny << "\ndx = " << f.dx << "\ndt = " << f.dt
      << "\nt = " << f.t << "\nx0 = " << f.x0 << "\ny0 = " << f.y0
      << "\nboundary = " << boundary_name(f.boundary) << "\nsponge_width = " << f.sponge_width
      << "\nsponge_strength = " << f.sponge_strength << "\nlayout = row-major, x fastest, "
      << "little-endian float64 (re, im)\n";
}

ComplexField read_snapshot(const std::filesystem::path& stem) {
  std::filesystem::path hdr = stem;
  hdr += ".hdr";
  std::ifstream in(hdr);
  if (!in) throw ConfigError("cannot read " + hdr.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto num = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(std::string("snapshot header: missing ") + key);
    return std::stod(it->second);
  };
  ComplexField f = ComplexField::make_2d(static_cast<int>(num("nx")), static_cast<int>(num("ny")),
                                         num("dx"), num("x0"), num("y0"),
                                         parse_boundary(kv["boundary"]));
  f.dt = num("dt");
  f.t = num("t");
  f.sponge_width = num("sponge_width");
  f.sponge_strength = num("sponge_strength");

  std::filesystem::path bin = stem;
  bin += ".bin";
  std::ifstream data(bin, std::ios::binary);
  if (!data) throw ConfigError("cannot read " + bin.string());
  for (cplx& v : f.samples) {
    double parts[2];
    for (double& part : parts) {
      unsigned char bytes[8];
      if (!data.read(reinterpret_cast<char*>(bytes), 8)) throw ConfigError("snapshot: truncated data");
      std::uint64_t u = 0;
      for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
      part = std::bit_cast<double>(u);
    }
    v = {parts[0], parts[1]};
  }
  return f;
}

double klein_gordon_residual(const ComplexField& prev, const ComplexField& curr,
                             const ComplexField& next, const MediumParams& p) {
  require_same_layout(prev, curr, "klein_gordon_residual");
  require_same_layout(curr, next, "klein_gordon_residual");
  if (!(curr.dt > 0.0)) throw DomainError("klein_gordon_residual: dt must be positive");
  const bool per = curr.boundary == Boundary::Periodic;
  const auto [i_lo, i_hi] = interior(curr.nx, 1, per);
  const auto [j_lo, j_hi] = interior(curr.ny, 1, per);
  const double h2 = curr.dx * curr.dx;
  const double dt2 = curr.dt * curr.dt;
  const double w2 = p.omega0 * p.omega0;
  double sum = 0.0;
  long count = 0;
  for (int j = j_lo; j < j_hi; ++j) {
    for (int i = i_lo; i < i_hi; ++i) {
      const cplx c = curr.at(i, j);
      cplx lap = (curr.at(neighbour(i, 1, curr.nx, true), j) +
                  curr.at(neighbour(i, -1, curr.nx, true), j) - 2.0 * c) / h2;
      if (curr.ny > 1)
        lap += (curr.at(i, neighbour(j, 1, curr.ny, true)) +
                curr.at(i, neighbour(j, -1, curr.ny, true)) - 2.0 * c) / h2;
      const cplx tt = (next.at(i, j) - 2.0 * c + prev.at(i, j)) / dt2;
      sum += std::norm(tt - p.c * p.c * lap + w2 * c);
      ++count;
    }
  }
  return std::sqrt(sum / count);
}

double dropped_term_ratio(const ComplexField& prev, const ComplexField& curr,
                          const ComplexField& next, double omega0) {
  require_same_layout(prev, curr, "dropped_term_ratio");
  require_same_layout(curr, next, "dropped_term_ratio");
  double tt = 0.0, t1 = 0.0;
  for (std::size_t k = 0; k < curr.samples.size(); ++k) {
    tt += std::norm((next.samples[k] - 2.0 * curr.samples[k] + prev.samples[k]) /
                    (curr.dt * curr.dt));
    t1 += std::norm(2.0 * omega0 * (next.samples[k] - prev.samples[k]) / (2.0 * curr.dt));
  }
  return t1 > 0.0 ? std::sqrt(tt / t1) : 0.0;
}

BohmGuide::BohmGuide(const ComplexField& f, const PilotWaveParams& q) : field_(f) {
  double peak = 0.0;
  for (const cplx& v : f.samples) peak = std::max(peak, std::abs(v));
  eps_ = kNodeEpsilon * peak;
  const double G = q.guidance();
  vx_.resize(f.samples.size());
  vy_.assign(f.samples.size(), 0.0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * f.nx + i;
      vx_[k] = G * phase_gradient(f, i, j, true);
      if (f.ny > 1) vy_[k] = G * phase_gradient(f, i, j, false);
    }
}

bool BohmGuide::contains(Vec2 at) const { return locate(field_, at).has_value(); }

std::optional<Vec2> BohmGuide::velocity(Vec2 at) const {
  const auto b = locate(field_, at);
  if (!b) throw DomainError("bohm velocity: point outside the lattice");
  const int nx = field_.nx;
  const cplx psi = blend<cplx>(*b, [&](int i, int j) { return field_.at(i, j); });
  if (std::abs(psi) <= eps_) return std::nullopt;
  auto idx = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
  return Vec2{blend<double>(*b, [&](int i, int j) { return vx_[idx(i, j)]; }),
              blend<double>(*b, [&](int i, int j) { return vy_[idx(i, j)]; })};
}

Vec2 bohm_velocity(const ComplexField& f, Vec2 at, const PilotWaveParams& q) {
  const BohmGuide guide(f, q);
  const auto v = guide.velocity(at);
  if (!v) throw NodeError("bohm_velocity: |psi| at a node, phase undefined");
  return *v;
}

double continuity_residual(const ComplexField& f0, const ComplexField& f1,
                           const PilotWaveParams& q) {
  require_same_layout(f0, f1, "continuity_residual");
  const double dt = f1.t - f0.t > 0.0 ? f1.t - f0.t : f1.dt;
  if (!(dt > 0.0)) throw DomainError("continuity_residual: fields need a positive time step");
  const bool per = f0.boundary == Boundary::Periodic;
  const int nx = f0.nx, ny = f0.ny;
  const double G = q.guidance();
  const double h = f0.dx;

  auto current = [&](int i, int j, bool along_x) {
    double j_sum = 0.0;
    for (const ComplexField* f : {&f0, &f1}) {
      const int n = along_x ? nx : ny;
      const int c = along_x ? i : j;
      const int hi = neighbour(c, 1, n, per), lo = neighbour(c, -1, n, per);
      const cplx a = along_x ? f->at(hi, j) : f->at(i, hi);
      const cplx b = along_x ? f->at(lo, j) : f->at(i, lo);
      j_sum += G * std::imag(std::conj(f->at(i, j)) * (a - b) / (2.0 * h));
    }
    return 0.5 * j_sum;
  };

  const auto [i_lo, i_hi] = interior(nx, 2, per);
  const auto [j_lo, j_hi] = interior(ny, 2, per);
  double sum = 0.0;
  long count = 0;
  for (int j = j_lo; j < j_hi; ++j)
    for (int i = i_lo; i < i_hi; ++i) {
      const double drho = (std::norm(f1.at(i, j)) - std::norm(f0.at(i, j))) / dt;
      double div = (current(neighbour(i, 1, nx, per), j, true) -
                    current(neighbour(i, -1, nx, per), j, true)) / (2.0 * h);
      if (ny > 1)
        div += (current(i, neighbour(j, 1, ny, per), false) -
                current(i, neighbour(j, -1, ny, per), false)) / (2.0 * h);
      const double r = drho + div;
      sum += r * r;
      ++count;
    }
  return std::sqrt(sum / count);
}

std::vector<Vec2> sample_density(const ComplexField& f, std::size_t n, std::uint64_t seed) {
  const int nx = f.nx, ny = f.ny;
  std::vector<double> row_cdf(ny + 1, 0.0);
  std::vector<double> cell_cdf(static_cast<std::size_t>(ny) * (nx + 1), 0.0);
  for (int j = 0; j < ny; ++j) {
    double* c = &cell_cdf[static_cast<std::size_t>(j) * (nx + 1)];
    for (int i = 0; i < nx; ++i) c[i + 1] = c[i] + std::norm(f.at(i, j));
    row_cdf[j + 1] = row_cdf[j] + c[nx];
  }
  if (!(row_cdf[ny] > 0.0)) throw NumericError("sample_density: field is zero");

  std::vector<Vec2> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Philox rng(seed, k);
    const double u_row = rng.uniform() * row_cdf[ny];
    int j = static_cast<int>(std::upper_bound(row_cdf.begin() + 1, row_cdf.end(), u_row) -
                             row_cdf.begin()) - 1;
    j = std::clamp(j, 0, ny - 1);
    const double* c = &cell_cdf[static_cast<std::size_t>(j) * (nx + 1)];
    const double u_col = rng.uniform() * c[nx];
    int i = static_cast<int>(std::upper_bound(c + 1, c + nx + 1, u_col) - c) - 1;
    i = std::clamp(i, 0, nx - 1);
    const double jx = rng.uniform() - 0.5;
    const double jy = ny > 1 ? rng.uniform() - 0.5 : 0.0;
    Vec2 pos{f.x(i) + jx * f.dx, f.y(j) + jy * f.dx};
    if (f.boundary != Boundary::Periodic) {
      pos.x = std::clamp(pos.x, f.x(0), f.x(nx - 1));
      pos.y = std::clamp(pos.y, f.y(0), f.y(ny - 1));
    }
    out[k] = pos;
  }
  return out;
}

}  // namespace dropsim
