#include "dropsim/harness/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dropsim/errors.hpp"

namespace dropsim {

FitResult fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("fit_line: x and y lengths differ");
  const std::size_t n = xs.size();
  if (n < 3) throw DomainError("fit_line: need at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw DomainError("fit_line: non-finite data");
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw NumericError("fit_line: x values have no spread");
  FitResult f;
  f.n_points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.residual_rms = std::sqrt(ss_res / n);
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return f;
}

FitResult fit_exponential(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> logs;
  logs.reserve(ys.size());
  for (double y : ys) {
    if (!(y > 0.0)) throw DomainError("fit_exponential: y values must be positive");
    logs.push_back(std::log(y));
  }
  return fit_line(xs, logs);
}

Histogram histogram(std::span<const double> values, std::span<const double> edges,
                    std::span<const double> weights) {
  if (edges.size() < 2) throw DomainError("histogram: need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw DomainError("histogram: edges must increase strictly");
  if (!weights.empty() && weights.size() != values.size())
    throw DomainError("histogram: weights and values differ in length");
  Histogram h;
  h.counts.assign(edges.size() - 1, 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = values[k];
    const double w = weights.empty() ? 1.0 : weights[k];
    if (v < edges.front()) {
      h.below += w;
    } else if (v >= edges.back() || std::isnan(v)) {
      h.above += w;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      h.counts[static_cast<std::size_t>(it - edges.begin()) - 1] += w;
    }
  }
  return h;
}

std::vector<double> uniform_edges(double lo, double hi, double width) {
  if (!(width > 0.0) || !(hi > lo)) throw DomainError("uniform_edges: need hi > lo, width > 0");
  std::vector<double> e;
  const long n = std::lround((hi - lo) / width);
  for (long i = 0; i <= n; ++i) e.push_back(lo + i * width);
  return e;
}

std::optional<std::size_t> first_local_minimum(std::span<const double> counts) {
  for (std::size_t i = 1; i + 1 < counts.size(); ++i)
    if (counts[i] < counts[i - 1] && counts[i] <= counts[i + 1]) return i;
  return std::nullopt;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical: bad input");
  const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace dropsim
