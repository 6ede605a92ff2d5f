#pragma once

#include <cmath>
#include <cstddef>

namespace expu {

struct ScalarMax {
  double x;
  double value;
};

/// Maximizes a unimodal f on [lo, hi] by golden-section search until the
/// bracket is narrower than `tol`. The endpoints are also evaluated, so a
/// boundary maximizer is returned exactly.
template <typename F>
ScalarMax golden_section_maximize(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarMax best{0.5 * (a + b), f(0.5 * (a + b))};
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo >= best.value) best = {lo, f_lo};
  if (f_hi > best.value) best = {hi, f_hi};
  return best;
}

}  // namespace expu
