#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace expu::detail {

// ceil(x), except that values within a few ulps of an integer snap to it:
// 64 * 1.1 must stay 71 rather than become 71 + 1 through representation error.
inline std::uint64_t guarded_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
    return static_cast<std::uint64_t>(r);
  }
  return static_cast<std::uint64_t>(std::ceil(x));
}

// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    carry_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace expu::detail
