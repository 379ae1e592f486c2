#include <cstring>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dropsim/kernels.hpp"
#include "dropsim/wavefield.hpp"

using namespace dropsim;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("pairwise sum has a fixed shape") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1.0 / (1.0 + i));
  const double a = kernels::pairwise_sum(v);
  double s = 0.0;
  for (double x : v) s += x;
  CHECK(a == doctest::Approx(s).epsilon(1e-14));
  CHECK(kernels::pairwise_sum({}) == 0.0);
  CHECK(kernels::pairwise_sum(v) == a);
}

TEST_CASE("residual rows: serial and OpenMP agree bit for bit") {
  const MediumParams p;
  const HeightField h = [&](double x, double y, double t) {
    return standing_wave_height(std::hypot(x, y), t, p);
  };
  ResidualGrid g;
  g.x0 = 0.1;
  g.y0 = -0.2;
  g.dx = 0.01;
  g.dt = 0.5 * g.dx / p.c;
  g.nx = 57;
  g.ny = 43;
  CHECK(same_bits(kernels::residual_rows_serial(h, g, p), kernels::residual_rows_omp(h, g, p)));
  CHECK(wave_equation_residual(h, g, p, true) == wave_equation_residual(h, g, p, false));
}

TEST_CASE("source superposition grid: serial and OpenMP agree bit for bit") {
  const MediumParams p;
  std::vector<WaveSource> src;
  for (int n = 0; n < 12; ++n)
    src.push_back({{-0.1 * n, 0.02 * n}, -n * p.tau, {0.4 * p.c, 0.0}, p.h0 * (1.0 - 0.05 * n),
                   0, 0.0});
  src.push_back({{0.5, 0.5}, 0.0, {}, p.h0, 1, 0.3});
  const kernels::Grid2 g{-1.0, -1.0, 0.02, 101, 77};
  std::vector<double> a(static_cast<std::size_t>(g.nx) * g.ny), b(a.size());
  kernels::superpose_grid_serial(src, g, 0.013, p, a);
  kernels::superpose_grid_omp(src, g, 0.013, p, b);
  CHECK(same_bits(a, b));
  std::vector<double> wrong(3);
  CHECK_THROWS(kernels::superpose_grid_serial(src, g, 0.0, p, wrong));
}
