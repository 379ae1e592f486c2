#include "dropsim/bessel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dropsim/errors.hpp"

namespace dropsim {
namespace {

constexpr double kSeriesLimit = 12.0;

double series(int m, double x) {
  // sum_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)
  const long double half = static_cast<long double>(x) / 2.0L;
  const long double q = -half * half;
  long double term = 1.0L;
  for (int j = 1; j <= m; ++j) term *= half / j;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + m));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > 4) break;
  }
  return static_cast<double>(sum);
}

double miller(int m, double x) {
  // Start well above both x and m so the seed error has decayed by the
  // time the recurrence reaches the orders we keep.
  int start = static_cast<int>(x) + m + 40;
  if (start % 2) ++start;
  double jp1 = 0.0;
  double j = 1e-300;
  double norm = 0.0;  // J0 + 2 sum J_{2k}
  double wanted = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm1 = (2.0 * n / x) * j - jp1;
    jp1 = j;
    j = jm1;
    if (n - 1 == m) wanted = j;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j;
    if (std::fabs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      norm *= 1e-250;
      wanted *= 1e-250;
    }
  }
  norm += j;  // J0
  return wanted / norm;
}

}  // namespace

double bessel_j(int m, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
  if (m < 0) throw DomainError("bessel_j: negative order " + std::to_string(m));
  const double ax = std::fabs(x);
  const double sign = (x < 0.0 && (m % 2)) ? -1.0 : 1.0;
  if (ax == 0.0) return m == 0 ? 1.0 : 0.0;
  if (ax <= kSeriesLimit) return sign * series(m, ax);
  return sign * miller(m, ax);
}

double bessel_j_signed(int m, double x) {
  if (m >= 0) return bessel_j(m, x);
  const double v = bessel_j(-m, x);
  return (m % 2) ? -v : v;
}

}  // namespace dropsim
