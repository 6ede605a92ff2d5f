#include "expu/stats.hpp"

#include <algorithm>
#include <cmath>

#include "expu/error.hpp"

namespace expu {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0 || successes > trials) throw Error(ErrorCode::InvalidConfig, "wilson_interval needs 0 <= k <= n, n > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the interval always contains p despite rounding at p = 0 or 1.
  return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

double binomial_se(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidConfig, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  if (std::isinf(sorted[lo]) || std::isinf(sorted[hi])) return sorted[hi];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace expu
