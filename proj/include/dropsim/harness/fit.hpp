#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dropsim {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;  // clamped to [0, 1]
  double residual_rms = 0.0;
  std::size_t n_points = 0;
};

/// Ordinary least squares. Throws DomainError for n < 3 or mismatched
/// lengths, NumericError when the x values have no spread.
FitResult fit_line(std::span<const double> xs, std::span<const double> ys);

/// fit_line on (x, log y). Throws DomainError unless every y > 0.
FitResult fit_exponential(std::span<const double> xs, std::span<const double> ys);

struct Histogram {
  std::vector<double> counts;  // half-open bins [e_i, e_{i+1})
  double below = 0.0;
  double above = 0.0;  // includes values equal to the last edge
};

/// Weighted when weights are given (same length as values).
/// Throws DomainError unless edges are strictly increasing.
Histogram histogram(std::span<const double> values, std::span<const double> edges,
                    std::span<const double> weights = {});

/// lo, lo + width, ..., up to hi.
std::vector<double> uniform_edges(double lo, double hi, double width);

/// First bin lower than its left neighbour and not higher than its right
/// neighbour. Bin 0 and the last bin never qualify.
std::optional<std::size_t> first_local_minimum(std::span<const double> counts);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical value c(alpha) sqrt((n + m) / (n m)).
double ks_critical(std::size_t n, std::size_t m, double alpha);

}  // namespace dropsim
