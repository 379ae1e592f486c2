#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; the two must agree bit for bit (tests/test_kernels.cpp).

#include <span>
#include <vector>

#include "dropsim/wavefield.hpp"

namespace dropsim::kernels {

/// Fixed-shape pairwise sum: the reduction tree depends only on the length.
double pairwise_sum(std::span<const double> values);

/// Per-row sums of squared wave-equation residuals.
std::vector<double> residual_rows_serial(const HeightField& field, const ResidualGrid& g,
                                         const MediumParams& p);
std::vector<double> residual_rows_omp(const HeightField& field, const ResidualGrid& g,
                                      const MediumParams& p);

struct Grid2 {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  int nx = 1;
  int ny = 1;
};

/// Surface height of a source superposition sampled on a grid, row-major (y outer).
void superpose_grid_serial(std::span<const WaveSource> sources, const Grid2& g, double t,
                           const MediumParams& p, std::span<double> out);
void superpose_grid_omp(std::span<const WaveSource> sources, const Grid2& g, double t,
                        const MediumParams& p, std::span<double> out);

}  // namespace dropsim::kernels
