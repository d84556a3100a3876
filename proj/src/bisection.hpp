#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace cantor::detail {

inline double next_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline double midpoint(double a, double b) { return a + 0.5 * (b - a); }

// k-th eigenvalue (1-based, counted from -inf) inside (lo, hi], given a
// counter returning the number of eigenvalues strictly below its argument.
// Requires count(next_up(lo)) < k <= count(next_up(hi)).
template <class Counter>
double bisect_eigenvalue(const Counter& count, std::size_t k, double lo, double hi, double tol) {
  double a = lo;
  double b = next_up(hi);
  while (b - a > tol) {
    const double m = midpoint(a, b);
    if (m <= a || m >= b) break;
    if (count(m) >= k) {
      b = m;
    } else {
      a = m;
    }
  }
  double result = midpoint(a, b);
  if (result > hi) result = hi;
  if (result <= lo) result = next_up(lo);
  return result;
}

}  // namespace cantor::detail
