#include "dropsim/harness/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "dropsim/bounce.hpp"
#include "dropsim/errors.hpp"
#include "dropsim/spin.hpp"

namespace dropsim {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

Json fit_json(const FitResult& f) {
  return Json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"r_squared", f.r_squared},
              {"residual_rms", f.residual_rms},
              {"n_points", f.n_points}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void emit_table(OutputSet& out, const std::string& stem, const Table& t, OutputFormat fmt) {
  if (fmt == OutputFormat::Csv) out.write(stem + ".csv", t.to_csv());
  else out.write(stem + ".json", t.to_json().dump(2) + "\n");
}

std::size_t count_of(double v, const char* key) {
  if (!(v >= 1.0) || v != std::floor(v))
    throw ConfigError(std::string("control '") + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

// ---- walker_speed_sweep ----------------------------------------------------

SpeedSweep walker_speed_sweep(const MediumParams& p, double a_lo_over_g, double a_hi_over_g,
                              int points, double margin) {
  if (points < 3) throw DomainError("walker_speed_sweep: need at least 3 points");
  if (!(a_hi_over_g > a_lo_over_g) || !(a_lo_over_g > 3.0))
    throw DomainError("walker_speed_sweep: need 3 < a_lo < a_hi (units of g)");
  if (!(margin > 1.0)) throw DomainError("walker_speed_sweep: margin must exceed 1");

  SpeedSweep out;
  out.table.columns = {"a_m_over_g", "T_over_tau", "v", "gamma", "speed_law_lhs"};
  std::vector<double> ratios(points), T(points);
  for (int i = 0; i < points; ++i) {
    ratios[i] = a_lo_over_g + (a_hi_over_g - a_lo_over_g) * i / (points - 1);
    T[i] = landing_time(DrivingConfig::make(ratios[i] * p.g, p), p);
  }
  out.kappa = calibrate_kappa(T.back(), p.c / margin, p);

  std::vector<double> xs, ys;
  for (int i = 0; i < points; ++i) {
    const double v = walker_speed(T[i], out.kappa, p);
    const double gamma = 1.0 / std::sqrt(1.0 - (v / p.c) * (v / p.c));
    const double lhs = speed_law_lhs(v, p);
    out.table.add({ratios[i], T[i] / p.tau, v, gamma, lhs});
    out.gamma_max = std::max(out.gamma_max, gamma);
    if (v > 0.0) {
      xs.push_back(T[i] / p.tau);
      ys.push_back(lhs);
    }
  }
  if (xs.size() < 3) throw RegimeError("walker_speed_sweep: fewer than 3 walking points");
  out.fit = fit_line(xs, ys);
  return out;
}

// ---- boundary_reflection ---------------------------------------------------

double medium_speed_for_ratio(double parallel_speed, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0) || !(parallel_speed > 0.0))
    throw DomainError("medium_speed_for_ratio: need v > 0 and 0 < ratio < 1");
  return parallel_speed / std::sqrt(1.0 - ratio);
}

ReflectionStudy reflection_study(const MediumParams& p, const ReflectionSetup& s) {
  if (!(s.free_speed > 0.0 && s.free_speed < p.c))
    throw DomainError("reflection_study: free speed outside (0, c)");
  if (!(s.start_factor > 2.0) || !(s.window_factor > 1.0) || !(s.dt_over_tau > 0.0))
    throw DomainError("reflection_study: start_factor > 2, window_factor > 1, dt > 0");
  const double m = p.rho0 * (4.0 * kPi / 3.0) * s.r0 * s.r0 * s.r0;
  const ForceConstants consts = ForceConstants::make(s.alpha, m, p.omega0, p.c);
  const double K = consts.alpha * consts.bbar * p.c / (4.0 * consts.m_eff);
  const double V0 = s.free_speed;

  ReflectionStudy out;
  out.d_min = 2.0 * K / (V0 * V0);
  const double d0 = s.start_factor * out.d_min;
  WalkerState w;
  w.position = {0.0, d0};
  w.velocity = {0.0, -V0};
  w.speed_cap = V0;
  ReflectionConfig cfg;
  cfg.medium = p;
  cfg.dt = s.dt_over_tau * p.tau;
  cfg.magnetic = s.magnetic;
  cfg.t_max = 4.0 * d0 / V0;
  cfg.acquired_parallel_speed = s.acquired_speed;
  out.trajectory = boundary_reflection(w, Wall{}, consts, cfg);

  const auto& rec = out.trajectory.records;
  const double window = s.window_factor * out.d_min;
  std::vector<double> xi, yi, xo, yo;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec[i].y > window) continue;
    auto& xs = i < out.trajectory.turning_index ? xi : xo;
    auto& ys = i < out.trajectory.turning_index ? yi : yo;
    xs.push_back(1.0 / rec[i].y);
    ys.push_back(rec[i].vy * rec[i].vy);
  }
  out.incoming = fit_line(xi, yi);
  out.outgoing = fit_line(xo, yo);
  out.v0_fit = std::sqrt(std::max(0.0, out.incoming.intercept));
  out.slope_ratio = out.outgoing.slope / out.incoming.slope;
  out.expected_ratio = s.magnetic ? magnetic_factor(s.acquired_speed, p) : 1.0;
  return out;
}

// ---- single_slit / double_slit ---------------------------------------------

double speed_for_wavelength(double lambda, const MediumParams& p) {
  if (!(lambda > 0.0)) throw DomainError("speed_for_wavelength: wavelength must be positive");
  // gamma v = k c^2 / omega0
  const double gv = (2.0 * kPi / lambda) * p.c * p.c / p.omega0;
  return gv / std::sqrt(1.0 + (gv / p.c) * (gv / p.c));
}

SlitStudy slit_study(const MediumParams& p, const SlitSetup& s) {
  if (!(s.bin_width > 0.0 && s.bin_width <= 45.0))
    throw DomainError("slit_study: bin width must lie in (0, 45] degrees");
  SlitStudy out;
  const double lambda = s.grid.wavelength;
  out.walker_speed = speed_for_wavelength(lambda, p);
  out.analytic_deg = s.geometry.kind == SlitKind::Single
                         ? single_slit_first_minimum(lambda, s.geometry.width)
                         : double_slit_first_minimum(lambda, s.geometry.separation);

  const DiffractedField field(s.geometry, s.grid, p.c * p.c / p.omega0, s.run.parallel);
  DropletRun run = s.run;
  run.tau = p.tau;
  const auto outcomes = guide_droplets(field, s.geometry, run);

  std::vector<double> angles, weights;
  out.launched = outcomes.size();
  for (const DropletOutcome& o : outcomes) {
    if (!o.exited) continue;
    ++out.exited;
    angles.push_back(std::fabs(o.angle_deg));
    weights.push_back(o.weight);
  }
  out.edges = uniform_edges(0.0, 90.0, s.bin_width);
  out.histogram = histogram(angles, out.edges, weights);
  std::vector<double> centres;
  for (std::size_t i = 0; i + 1 < out.edges.size(); ++i)
    centres.push_back(0.5 * (out.edges[i] + out.edges[i + 1]));
  out.far_field = far_field_intensity(s.geometry.kind, lambda, s.geometry.width,
                                      s.geometry.separation, centres);
  out.mc_minimum_bin = first_local_minimum(out.histogram.counts);
  out.far_field_minimum_bin = first_local_minimum(out.far_field);
  return out;
}

// ---- tunnelling_sweep ------------------------------------------------------

TunnellingStudy tunnelling_study(const MediumParams& p, const TunnellingSetup& s,
                                 const FieldObserver& observer) {
  if (!(s.height_ratio > 1.0)) throw DomainError("tunnelling_study: barrier must exceed the energy");
  const PilotWaveParams q = PilotWaveParams::make(s.m0, p);
  const double D = q.diffusion();
  const double E = q.bbar * D * s.packet.k0 * s.packet.k0;
  TunnellingStudy out;
  out.height = s.height_ratio * E;
  const double heights[] = {out.height};
  out.result = tunnelling_sweep(heights, s.widths, s.packet, q, s.grid, observer);
  std::vector<double> w, T;
  for (const TunnellingRow& r : out.result.rows) {
    w.push_back(r.width);
    T.push_back(r.transmission);
  }
  out.fit = fit_exponential(w, T);
  out.decay_rate = -out.fit.slope;
  out.kappa = std::sqrt((out.height - E) / (q.bbar * D));
  const double V0 = out.height;
  for (double width : w) {
    const double sh = std::sinh(out.kappa * width);
    out.oracle.push_back(1.0 / (1.0 + V0 * V0 * sh * sh / (4.0 * E * (V0 - E))));
  }
  out.oracle_fit = fit_exponential(w, out.oracle);
  return out;
}

// ---- spin_tables -----------------------------------------------------------

SpinTables spin_tables(const MediumParams& p) {
  SpinTables out;
  const double r2 = 1.0 / std::numbers::sqrt2;
  const double h0 = p.h0;

  // alpha, expected L/L0, coefficients of h_1 and h_-1 in the surface.
  struct AlphaRow {
    double alpha, expected, c1, cm1;
  };
  const AlphaRow rows[] = {{0.0, 1.0, 1.0, 0.0},
                           {kPi / 4.0, 0.0, r2, r2},
                           {kPi / 2.0, -1.0, 0.0, 1.0},
                           {3.0 * kPi / 4.0, 0.0, -r2, r2},
                           {kPi, 1.0, -1.0, 0.0}};
  out.alpha_rows.columns = {"alpha", "L_over_L0", "expected", "field_error"};
  double e_lo = INFINITY, e_hi = -INFINITY;
  const WaveSource s1{{}, 0.0, {}, h0, 1, 0.0};
  const WaveSource sm1{{}, 0.0, {}, h0, -1, 0.0};
  for (const AlphaRow& row : rows) {
    const SpinState s = SpinState::from_alpha(row.alpha);
    const double L = angular_momentum(s, 1.0);
    double field_err = 0.0;
    for (int ir = 1; ir <= 6; ++ir)
      for (int it = 0; it < 8; ++it) {
        const double r = 0.3 * ir / p.k_r();
        const double th = 2.0 * kPi * it / 8.0;
        const double t = 0.013 * ir * it * p.tau;
        const double h = superposed_field(s, r, th, t, h0, p).height;
        const double expect = row.c1 * rotating_mode_height(s1, r, th, t, p) +
                              row.cm1 * rotating_mode_height(sm1, r, th, t, p);
        field_err = std::max(field_err, std::fabs(h - expect) / h0);
      }
    out.alpha_rows.add({row.alpha, L, row.expected, field_err});
    out.max_alpha_error = std::max(out.max_alpha_error, std::fabs(L - row.expected));
    out.max_field_error = std::max(out.max_field_error, field_err);
    e_lo = std::min(e_lo, s.weight());
    e_hi = std::max(e_hi, s.weight());
  }
  out.energy_spread = e_hi - e_lo;

  struct PauliRow {
    double beta, phi, sx, sy, sz;
  };
  const PauliRow pauli[] = {{0.0, 0.0, 0.0, 0.0, 1.0},
                            {kPi / 2.0, 0.0, 1.0, 0.0, 0.0},
                            {kPi / 2.0, kPi / 2.0, 0.0, 1.0, 0.0}};
  out.pauli_rows.columns = {"beta", "phi", "sigma_x", "sigma_y", "sigma_z",
                            "expected_x", "expected_y", "expected_z"};
  for (const PauliRow& row : pauli) {
    const SpinState s = SpinState::from_bloch(0.0, row.beta, row.phi);
    const std::vector<double> got{spin_projection(s, Axis::X), spin_projection(s, Axis::Y),
                                  spin_projection(s, Axis::Z)};
    const std::vector<double> want{row.sx, row.sy, row.sz};
    out.pauli_rows.add({row.beta, row.phi, got[0], got[1], got[2], want[0], want[1], want[2]});
    out.max_pauli_error = std::max(out.max_pauli_error, max_abs_diff(got, want));
  }

  // Carry beta from 0 to 2 pi in small steps, tracking the lifted angles.
  constexpr int kSteps = 64;
  const SpinState first = SpinState::from_bloch(0.0, 0.0, 0.0);
  std::optional<BlochAngles> track = bloch_angles(first);
  SpinState last = first;
  for (int k = 1; k <= kSteps; ++k) {
    last = SpinState::from_bloch(0.0, 2.0 * kPi * k / kSteps, 0.0);
    track = bloch_angles(last, track);
  }
  out.lifted_beta_end = track->beta;
  out.sign_reversed = std::abs(last.a1 + first.a1) < 1e-12 && std::abs(last.a2 + first.a2) < 1e-12;
  out.sigma_returned = true;
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
    out.sigma_returned =
        out.sigma_returned && std::fabs(spin_projection(last, ax) - spin_projection(first, ax)) < 1e-12;
  return out;
}

// ---- scenario runners ------------------------------------------------------

namespace {

using Runner = std::function<Json(const ScenarioConfig&, OutputSet&)>;

Json run_walker_speed_sweep(const ScenarioConfig& cfg, OutputSet& out) {
  const SpeedSweep s = walker_speed_sweep(
      cfg.medium, cfg.control("a_min_over_g"), cfg.control("a_max_over_g"),
      static_cast<int>(count_of(cfg.control("points"), "points")), cfg.control("speed_margin"));
  emit_table(out, "speed_sweep", s.table, cfg.format);
  return Json{{"kappa", s.kappa}, {"gamma_max", s.gamma_max}, {"fit", fit_json(s.fit)}};
}

Json run_boundary_reflection(const ScenarioConfig& cfg, OutputSet& out) {
  ReflectionSetup s;
  s.free_speed = cfg.control("free_speed");
  s.alpha = cfg.control("alpha");
  s.r0 = cfg.control("r0");
  s.start_factor = cfg.control("start_factor");
  s.dt_over_tau = cfg.control("dt_over_tau");
  s.acquired_speed = cfg.control("acquired_speed");
  s.window_factor = cfg.control("window_factor");
  s.magnetic = cfg.control("magnetic") != 0.0;
  const ReflectionStudy r = reflection_study(cfg.medium, s);

  Table t{{"t", "x", "y", "vx", "vy", "inv_d", "vperp_sq"}, {}};
  for (const TrajectoryRecord& rec : r.trajectory.records)
    t.add({rec.t, rec.x, rec.y, rec.vx, rec.vy, 1.0 / rec.y, rec.vy * rec.vy});
  emit_table(out, "trajectory", t, cfg.format);

  const double ratio = cfg.control("target_ratio");
  const double v_over_c = parallel_speed_from_factor(ratio, cfg.medium) / cfg.medium.c;
  return Json{{"d_min_predicted", r.d_min},
              {"closest_distance", r.trajectory.closest_distance},
              {"incoming_fit", fit_json(r.incoming)},
              {"outgoing_fit", fit_json(r.outgoing)},
              {"v0_fit", r.v0_fit},
              {"free_speed", s.free_speed},
              {"v0_relative_error", std::fabs(r.v0_fit - s.free_speed) / s.free_speed},
              {"slope_ratio", r.slope_ratio},
              {"expected_ratio", r.expected_ratio},
              {"target_ratio", ratio},
              {"v_over_c_for_target", v_over_c}};
}

Json run_slit(const ScenarioConfig& cfg, OutputSet& out, SlitKind kind) {
  SlitSetup s;
  s.geometry.kind = kind;
  s.geometry.width = cfg.control("width");
  if (kind == SlitKind::Double) s.geometry.separation = cfg.control("separation");
  s.grid.wavelength = cfg.control("wavelength");
  s.grid.ny = static_cast<int>(count_of(cfg.control("ny"), "ny"));
  s.grid.dy = s.grid.wavelength / cfg.control("samples_per_wavelength");
  s.grid.x_start = cfg.control("x_start");
  s.grid.dx_row = cfg.control("dx_row");
  s.grid.x_end = cfg.control("exit_radius") + 10.0;
  s.grid.y_keep = cfg.control("exit_radius") + 10.0;
  s.run.n = count_of(cfg.control("trajectories"), "trajectories");
  s.run.seed = cfg.seed;
  s.run.memory = cfg.control("memory");
  s.run.exit_radius = cfg.control("exit_radius");
  s.bin_width = cfg.control("bin_width");
  const SlitStudy r = slit_study(cfg.medium, s);

  Table t{{"bin_lo", "bin_hi", "weight", "far_field"}, {}};
  double total = 0.0;
  for (double c : r.histogram.counts) total += c;
  for (std::size_t i = 0; i < r.histogram.counts.size(); ++i)
    t.add({r.edges[i], r.edges[i + 1], total > 0.0 ? r.histogram.counts[i] / total : 0.0,
           r.far_field[i]});
  emit_table(out, "histogram", t, cfg.format);

  auto bin_json = [&](const std::optional<std::size_t>& b) {
    return b ? Json{{"index", *b}, {"lo_deg", r.edges[*b]}, {"hi_deg", r.edges[*b + 1]}}
             : Json(nullptr);
  };
  return Json{{"wavelength", s.grid.wavelength},
              {"walker_speed", r.walker_speed},
              {"analytic_minimum_deg", optional_json(r.analytic_deg)},
              {"mc_minimum_bin", bin_json(r.mc_minimum_bin)},
              {"far_field_minimum_bin", bin_json(r.far_field_minimum_bin)},
              {"launched", r.launched},
              {"exited", r.exited}};
}

Json run_tunnelling(const ScenarioConfig& cfg, OutputSet& out) {
  TunnellingSetup s;
  s.packet = {cfg.control("x0"), cfg.control("sigma"), cfg.control("k0")};
  s.grid.n = static_cast<int>(count_of(cfg.control("n"), "n"));
  s.grid.length = cfg.control("length");
  s.grid.dt = cfg.control("dt");
  s.grid.snapshot_every = cfg.snapshot_every;
  s.height_ratio = cfg.control("height_ratio");
  s.m0 = cfg.control("m0");
  s.widths.clear();
  const double w_lo = cfg.control("width_min"), w_hi = cfg.control("width_max");
  const double w_step = cfg.control("width_step");
  if (!(w_step > 0.0) || !(w_hi > w_lo)) throw ConfigError("width_min < width_max, width_step > 0");
  for (int i = 0; w_lo + i * w_step <= w_hi + 1e-9 * w_step; ++i) s.widths.push_back(w_lo + i * w_step);

  FieldObserver observer;
  int snap = 0;
  if (cfg.snapshot_every > 0)
    observer = [&](const ComplexField& f, double, double) {
      std::ostringstream stem;
      stem << "snapshot_" << snap++;
      write_snapshot(f, out.dir() / stem.str());
      out.record(stem.str() + ".hdr");
      out.record(stem.str() + ".bin");
    };
  const TunnellingStudy r = tunnelling_study(cfg.medium, s, observer);

  Table t{{"height", "width", "transmission", "oracle"}, {}};
  const double E = r.result.packet_energy;
  for (std::size_t i = 0; i < r.result.rows.size(); ++i) {
    const TunnellingRow& row = r.result.rows[i];
    t.add({row.height, row.width, row.transmission, r.oracle[i]});
  }
  emit_table(out, "transmission", t, cfg.format);
  return Json{{"barrier_height", r.height},
              {"packet_energy", E},
              {"over_barrier", r.result.over_barrier},
              {"fit", fit_json(r.fit)},
              {"decay_rate", r.decay_rate},
              {"oracle_fit", fit_json(r.oracle_fit)},
              {"oracle_decay_rate", -r.oracle_fit.slope},
              {"decay_relative_error",
               std::fabs(r.decay_rate + r.oracle_fit.slope) / -r.oracle_fit.slope},
              {"kappa", r.kappa},
              {"snapshots", snap}};
}

Json run_orbiting_pair(const ScenarioConfig& cfg, OutputSet& out) {
  const MediumParams& p = cfg.medium;
  const double Omega = cfg.control("omega_ratio") * p.omega0;
  const RotatingPair pair = RotatingPair::make(Omega, p.h0, p);
  const double kr = p.k_r();

  Table t{{"kr_r", "theta", "t_over_tau", "exact", "factored"}, {}};
  double worst = 0.0, scale = 0.0;
  for (int ir = 1; ir <= 20; ++ir)
    for (int it = 0; it < 16; ++it) {
      const double r = 0.1 * ir / kr;
      const double th = 2.0 * kPi * it / 16.0;
      const double tt = 0.37 * p.tau;
      const double e = rotating_pair_height(pair, r, th, tt, p, PairForm::Exact);
      const double f = rotating_pair_height(pair, r, th, tt, p, PairForm::Factored);
      t.add({kr * r, th, tt / p.tau, e, f});
      worst = std::max(worst, std::fabs(e - f));
      scale = std::max(scale, std::fabs(e));
    }
  emit_table(out, "pair_field", t, cfg.format);

  double node = 0.0;
  for (int k = 0; k < 32; ++k) {
    const double tt = 0.11 * k * p.tau;
    for (double side : {0.5 * kPi, -0.5 * kPi})
      for (int ir = 1; ir <= 8; ++ir)
        node = std::max(node, std::fabs(rotating_pair_height(pair, 0.25 * ir / kr, Omega * tt + side,
                                                             tt, p, PairForm::Factored)));
  }

  const double v = cfg.control("coupling_speed_ratio") * p.c;
  const double alpha2 = pair_boundary_coupling(v, cfg.control("alpha1"), p);

  std::vector<double> far, near;
  for (int i = 0; i < 12; ++i) far.push_back(std::pow(10.0, 1.0 + i / 11.0) / kr);
  for (int i = 0; i < 6; ++i) near.push_back((0.5 + 0.3 * i) / kr);
  const CirculationFit plus = far_field_circulation(1, far, p);
  const CirculationFit minus = far_field_circulation(-1, far, p);
  const CirculationFit close = far_field_circulation(1, near, p);

  const SpinState sa = SpinState::from_bloch(0.0, kPi / 2.0, 0.0);
  const ComplexWave xi_a = [&](Vec2 x, double tt) {
    return superposed_field(sa, norm(x), std::atan2(x.y, x.x), tt, p.h0, p).xi;
  };
  const Vec2 d{cfg.control("pair_distance") * 2.0 * kPi / kr, 0.0};
  const ComplexWave xi_b = [&](Vec2 x, double tt) { return xi_a(x - d, tt); };
  double exchange = 0.0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      const Vec2 x{-3.0 + 0.9 * i, -2.0 + 0.5 * j};
      const cplx f_ab = antisymmetric_pair_field(xi_a, d, x, 0.21 * p.tau);
      const cplx f_ba = antisymmetric_pair_field(xi_b, Vec2{-d.x, -d.y}, x, 0.21 * p.tau);
      exchange = std::max(exchange, std::abs(f_ab + f_ba));
    }

  auto circ = [](const CirculationFit& c) {
    return Json{{"sign", c.sign},
                {"slope", c.fit.slope},
                {"r_squared", c.fit.r_squared},
                {"regime_warning", c.regime_warning},
                {"accepted", c.accepted}};
  };
  return Json{{"Omega", Omega},
              {"k1", pair.k1},
              {"k2", pair.k2},
              {"factored_max_relative_deviation", scale > 0.0 ? worst / scale : 0.0},
              {"node_line_max_height", node},
              {"alpha2", alpha2},
              {"circulation_plus", circ(plus)},
              {"circulation_minus", circ(minus)},
              {"circulation_near_field", circ(close)},
              {"exchange_max_residual", exchange}};
}

Json run_spin_tables(const ScenarioConfig& cfg, OutputSet& out) {
  const SpinTables s = spin_tables(cfg.medium);
  const double L0 = cfg.control("L0");
  Table alpha = s.alpha_rows;
  alpha.columns.push_back("L");
  for (auto& row : alpha.rows) row.push_back(L0 * row[1]);
  emit_table(out, "alpha_rows", alpha, cfg.format);
  emit_table(out, "pauli_rows", s.pauli_rows, cfg.format);
  return Json{{"max_alpha_error", s.max_alpha_error},
              {"max_pauli_error", s.max_pauli_error},
              {"max_field_error", s.max_field_error},
              {"sign_reversed", s.sign_reversed},
              {"sigma_returned", s.sigma_returned},
              {"lifted_beta_end", s.lifted_beta_end},
              {"energy_spread", s.energy_spread}};
}

Json run_pair_alignment_torque(const ScenarioConfig& cfg, OutputSet& out) {
  const MediumParams& p = cfg.medium;
  const double lambda = 2.0 * kPi / p.k_r();
  const double a = 0.5 * cfg.control("spacing_over_wavelength") * lambda;
  const Vec2 B{cfg.control("separation_over_wavelength") * lambda,
               cfg.control("offset_over_wavelength") * lambda};
  const double Q = cfg.control("Q");
  const double f = p.omega0;
  // A aligned with x, B with y; each droplet pair bounces in antiphase.
  const Oscillator A_plus{{a, 0.0}, Q, 0.0, f, {}};
  const Oscillator A_minus{{-a, 0.0}, Q, kPi, f, {}};
  const Oscillator B_plus{B + Vec2{0.0, a}, Q, 0.0, f, {}};
  const Oscillator B_minus{B - Vec2{0.0, a}, Q, kPi, f, {}};

  Table t{{"droplet", "x", "y", "fx", "fy"}, {}};
  Vec2 net{};
  double torque = 0.0;
  int idx = 0;
  for (const Oscillator* b : {&B_plus, &B_minus}) {
    Vec2 F{};
    for (const Oscillator* s : {&A_plus, &A_minus}) F = F + pair_force_vector(*b, *s, p.rho0);
    const Vec2 arm = b->position - B;
    torque += arm.x * F.y - arm.y * F.x;
    net = net + F;
    t.add({static_cast<double>(idx++), b->position.x, b->position.y, F.x, F.y});
  }
  emit_table(out, "forces_on_b", t, cfg.format);
  const char* sense = torque > 0.0 ? "anticlockwise" : (torque < 0.0 ? "clockwise" : "none");
  return Json{{"torque_on_b", torque},
              {"torque_sign", torque > 0.0 ? 1 : (torque < 0.0 ? -1 : 0)},
              {"rotation_sense", sense},
              {"net_force_on_b", Json::array({net.x, net.y})}};
}

Json run_rotating_bath(const ScenarioConfig& cfg, OutputSet& out) {
  const double v = cfg.control("speed");
  const double Wb = cfg.control("bath_omega");
  const double dt = cfg.control("dt");
  const double duration = cfg.control("duration");
  if (!(v > 0.0 && Wb > 0.0 && dt > 0.0 && duration > dt))
    throw ConfigError("rotating_bath_demo: speed, bath_omega, dt, duration must be positive");
  // Coriolis turning at rate 2 Omega_b: the heading is integrated exactly
  // and the position by the midpoint rule.
  const double R = v / (2.0 * Wb);
  const long steps = std::lround(duration / dt);
  Table t{{"t", "x", "y"}, {}};
  Vec2 pos{};
  t.add({0.0, 0.0, 0.0});
  const Vec2 centre{0.0, -R};
  double worst = 0.0;
  for (long n = 1; n <= steps; ++n) {
    const double th = -2.0 * Wb * (n - 0.5) * dt;
    pos = pos + (v * dt) * Vec2{std::cos(th), std::sin(th)};
    worst = std::max(worst, std::fabs(norm(pos - centre) - R));
    if (n % 10 == 0) t.add({n * dt, pos.x, pos.y});
  }
  emit_table(out, "trajectory", t, cfg.format);
  return Json{{"orbit_radius_predicted", R},
              {"max_radius_deviation", worst},
              {"qualitative_only", true}};
}

struct Entry {
  ScenarioInfo info;
  Runner run;
};

std::vector<Entry> build_registry() {
  std::vector<Entry> reg;
  const MediumParams base{};
  reg.push_back({{"walker_speed_sweep", "landing times and walker speeds over a driving sweep",
                  {{"a_min_over_g", 3.5}, {"a_max_over_g", 4.2}, {"points", 15}, {"speed_margin", 1.08}},
                  base},
                 run_walker_speed_sweep});

  MediumParams refl = base;
  refl.c = medium_speed_for_ratio(18.0, 14.0 / 18.0);
  reg.push_back({{"boundary_reflection", "walker reflected by its image behind a straight wall",
                  {{"free_speed", 18.0}, {"alpha", 0.3}, {"r0", 0.4}, {"start_factor", 200.0},
                   {"dt_over_tau", 0.002}, {"acquired_speed", 18.0}, {"window_factor", 50.0},
                   {"magnetic", 1.0}, {"target_ratio", 14.0 / 18.0}},
                  refl},
                 run_boundary_reflection});

  const std::map<std::string, double> slit{{"wavelength", 7.3}, {"width", 14.8},
                                           {"trajectories", 20000}, {"memory", 20.0},
                                           {"exit_radius", 250.0}, {"bin_width", 5.0},
                                           {"ny", 4096}, {"samples_per_wavelength", 16},
                                           {"x_start", 7.3}, {"dx_row", 0.5}};
  reg.push_back({{"single_slit", "walkers guided through one slit, angle histogram", slit, base},
                 [](const ScenarioConfig& c, OutputSet& o) { return run_slit(c, o, SlitKind::Single); }});
  auto dbl = slit;
  dbl["width"] = 5.0;
  dbl["separation"] = 14.3;
  reg.push_back({{"double_slit", "walkers guided through two slits, angle histogram", dbl, base},
                 [](const ScenarioConfig& c, OutputSet& o) { return run_slit(c, o, SlitKind::Double); }});

  reg.push_back({{"tunnelling_sweep", "packet transmission through rectangular barriers",
                  {{"x0", -90.0}, {"sigma", 15.0}, {"k0", 1.0}, {"n", 8192}, {"length", 600.0},
                   {"dt", 0.02}, {"height_ratio", 2.0}, {"width_min", 1.0}, {"width_max", 4.0},
                   {"width_step", 0.5}, {"m0", 2.5e-4}},
                  base},
                 run_tunnelling});

  reg.push_back({{"orbiting_pair", "rotating pair field, node line, circulation and pair constants",
                  {{"omega_ratio", 0.05}, {"coupling_speed_ratio", 0.25}, {"alpha1", 0.3},
                   {"pair_distance", 1.5}},
                  base},
                 run_orbiting_pair});

  reg.push_back({{"spin_tables", "angular momentum and Pauli tables of two-mode states",
                  {{"L0", 1.0}}, base},
                 run_spin_tables});

  reg.push_back({{"pair_alignment_torque", "torque between two perpendicular droplet pairs",
                  {{"spacing_over_wavelength", 0.5}, {"separation_over_wavelength", 10.0},
                   {"offset_over_wavelength", 3.0}, {"Q", 1.0}},
                  base},
                 run_pair_alignment_torque});

  reg.push_back({{"rotating_bath_demo", "walker circling under the Coriolis force",
                  {{"speed", 10.0}, {"bath_omega", 0.5}, {"dt", 0.001}, {"duration", 10.0}}, base},
                 run_rotating_bath});
  return reg;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> reg = build_registry();
  return reg;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> v;
    for (const Entry& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ScenarioInfo& scenario_info(const std::string& name) {
  for (const ScenarioInfo& s : scenario_registry())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const Entry* entry = nullptr;
  for (const Entry& e : registry())
    if (e.info.name == cfg.scenario) entry = &e;
  if (!entry) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  for (const auto& [key, value] : entry->info.defaults)
    if (!cfg.controls.count(key)) throw ConfigError("scenario control '" + key + "' is missing");
  cfg.medium.validate();

  OutputSet out(cfg.out_dir);
  Json metrics = entry->run(cfg, out);
  Json summary = Json::object();
  summary["scenario"] = cfg.scenario;
  summary["seed"] = cfg.seed;
  summary["medium"] = Json{{"c", cfg.medium.c},          {"omega0", cfg.medium.omega0},
                           {"g", cfg.medium.g},          {"a_m_over_g", cfg.medium.a_m / cfg.medium.g},
                           {"rho0", cfg.medium.rho0},    {"h0", cfg.medium.h0}};
  Json controls = Json::object();
  for (const auto& [k, v] : cfg.controls) controls[k] = v;
  summary["controls"] = std::move(controls);
  summary["metrics"] = std::move(metrics);
  out.write("summary.json", summary.dump(2) + "\n");
  return {summary, out.write_manifest(cfg.scenario, cfg.seed)};
}

}  // namespace dropsim
