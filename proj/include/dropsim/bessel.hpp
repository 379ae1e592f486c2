#pragma once

namespace dropsim {

/// Bessel function of the first kind J_m(x) for integer order m >= 0.
///
/// Ascending power series (extended precision accumulation) for |x| <= 12,
/// normalized backward (Miller) recurrence above. Absolute error stays
/// below 1e-12 for |x| <= 50. Negative orders are the caller's business:
/// J_{-m} = (-1)^m J_m.
double bessel_j(int m, double x);

/// J_m for any sign of m, folding negative orders.
double bessel_j_signed(int m, double x);

}  // namespace dropsim
