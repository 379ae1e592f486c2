#include "dropsim/kernels.hpp"

#include <cmath>

#include "dropsim/errors.hpp"

namespace dropsim::kernels {

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

double residual_row(const HeightField& h, const ResidualGrid& g, const MediumParams& p,
                    int j) {
  const double inv_c2dt2 = 1.0 / (p.c * p.c * g.dt * g.dt);
  const double inv_dx2 = 1.0 / (g.dx * g.dx);
  const double y = g.y0 + j * g.dx;
  const double t = g.t0;
  double row = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x0 + i * g.dx;
    const double c0 = h(x, y, t);
    const double htt = (h(x, y, t + g.dt) - 2.0 * c0 + h(x, y, t - g.dt)) * inv_c2dt2;
    const double lap = (h(x + g.dx, y, t) + h(x - g.dx, y, t) + h(x, y + g.dx, t) +
                        h(x, y - g.dx, t) - 4.0 * c0) *
                       inv_dx2;
    const double r = htt - lap;
    row += r * r;
  }
  return row;
}

}  // namespace

std::vector<double> residual_rows_serial(const HeightField& field, const ResidualGrid& g,
                                         const MediumParams& p) {
  std::vector<double> rows(static_cast<std::size_t>(g.ny));
  for (int j = 0; j < g.ny; ++j) rows[j] = residual_row(field, g, p, j);
  return rows;
}

std::vector<double> residual_rows_omp(const HeightField& field, const ResidualGrid& g,
                                      const MediumParams& p) {
  std::vector<double> rows(static_cast<std::size_t>(g.ny));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j) rows[j] = residual_row(field, g, p, j);
  return rows;
}

void superpose_grid_serial(std::span<const WaveSource> sources, const Grid2& g, double t,
                           const MediumParams& p, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(g.nx) * g.ny)
    throw DomainError("superpose_grid: output size mismatch");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out[static_cast<std::size_t>(j) * g.nx + i] =
          superpose(sources, {g.x0 + i * g.dx, g.y0 + j * g.dx, t}, p);
}

void superpose_grid_omp(std::span<const WaveSource> sources, const Grid2& g, double t,
                        const MediumParams& p, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(g.nx) * g.ny)
    throw DomainError("superpose_grid: output size mismatch");
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out[static_cast<std::size_t>(j) * g.nx + i] =
          superpose(sources, {g.x0 + i * g.dx, g.y0 + j * g.dx, t}, p);
}

}  // namespace dropsim::kernels
