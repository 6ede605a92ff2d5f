#pragma once

#include <cstdint>
#include <vector>

namespace expu {

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// sqrt(p (1 - p) / trials).
double binomial_se(double p, std::uint64_t trials);

/// Linear-interpolation quantile of an ascending sample (+inf allowed; any
/// interpolation touching +inf yields +inf).
double sorted_quantile(const std::vector<double>& sorted, double q);

}  // namespace expu
