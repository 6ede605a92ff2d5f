#pragma once

#include <span>
#include <string>
#include <vector>

namespace expu {

/// Single-letter input pmf Q; the i.i.d. ensemble uses Q^n.
class InputDistribution {
 public:
  /// Throws InvalidDistribution unless entries are >= 0 and sum to 1 (1e-12).
  explicit InputDistribution(std::vector<double> pmf);

  static InputDistribution uniform(std::size_t size);
  /// Parses "0.5,0.5".
  static InputDistribution parse(const std::string& text);

  std::size_t size() const noexcept { return pmf_.size(); }
  double operator[](std::size_t a) const { return pmf_[a]; }
  std::span<const double> pmf() const noexcept { return pmf_; }

 private:
  std::vector<double> pmf_;
};

}  // namespace expu
