// Serial reference against OpenMP variant for each parallel kernel.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dropsim/kernels.hpp"
#include "dropsim/quantum.hpp"
#include "dropsim/wavefield.hpp"

using namespace dropsim;

namespace {

const MediumParams kMedium{};

ResidualGrid residual_grid(int n) {
  const double lam = 2.0 * std::numbers::pi * kMedium.c / kMedium.omega0;
  ResidualGrid g;
  g.dx = lam / n;
  g.dt = 0.5 * g.dx / kMedium.c;
  g.nx = g.ny = n;
  return g;
}

const HeightField kStanding = [](double x, double y, double t) {
  return standing_wave_height(std::hypot(x, y), t, kMedium);
};

template <bool Parallel>
void residual_rows(benchmark::State& state) {
  const ResidualGrid g = residual_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto rows = Parallel ? kernels::residual_rows_omp(kStanding, g, kMedium)
                         : kernels::residual_rows_serial(kStanding, g, kMedium);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

// A walker's trail: one source per bounce along a straight path.
std::vector<WaveSource> trail(int n) {
  std::vector<WaveSource> s(n);
  for (int i = 0; i < n; ++i) {
    s[i].center = {-0.1 * i, 0.0};
    s[i].birth_time = -kMedium.tau * i;
    s[i].amplitude = kMedium.h0;
  }
  return s;
}

template <bool Parallel>
void superpose_grid(benchmark::State& state) {
  const auto sources = trail(static_cast<int>(state.range(1)));
  kernels::Grid2 g;
  g.nx = g.ny = static_cast<int>(state.range(0));
  g.dx = 0.05;
  g.x0 = g.y0 = -0.5 * g.nx * g.dx;
  std::vector<double> out(static_cast<std::size_t>(g.nx) * g.ny);
  for (auto _ : state) {
    if (Parallel)
      kernels::superpose_grid_omp(sources, g, 0.0, kMedium, out);
    else
      kernels::superpose_grid_serial(sources, g, 0.0, kMedium, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * g.nx * g.ny * state.range(1));
}

template <bool Parallel>
void bohm_ensemble(benchmark::State& state) {
  const PilotWaveParams q = PilotWaveParams::make(2.5e-4, kMedium);
  ComplexField f0 = ComplexField::make_2d(64, 64, 0.2, -6.4, -6.4, Boundary::Periodic);
  f0.dt = 0.02;
  f0.fill([](double x, double y) {
    return std::exp(-(x * x + y * y) / 8.0) * std::polar(1.0, 0.5 * x + 0.2 * y);
  });
  f0.normalize();
  const auto starts = sample_density(f0, static_cast<std::size_t>(state.range(0)), 3);
  EnsembleConfig cfg;
  cfg.steps = 20;
  cfg.parallel = Parallel;
  for (auto _ : state) {
    ComplexField f = f0;
    auto tr = evolve_bohm_ensemble(f, q, starts, 3, cfg);
    benchmark::DoNotOptimize(tr.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.steps);
}

}  // namespace

BENCHMARK(residual_rows<false>)->Name("residual_rows/serial")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(residual_rows<true>)->Name("residual_rows/omp")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(superpose_grid<false>)->Name("superpose_grid/serial")->Args({128, 50})->Args({256, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(superpose_grid<true>)->Name("superpose_grid/omp")->Args({128, 50})->Args({256, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(bohm_ensemble<false>)->Name("bohm_ensemble/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(bohm_ensemble<true>)->Name("bohm_ensemble/omp")->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
