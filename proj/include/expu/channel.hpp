#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace expu {

using Symbol = std::uint32_t;

/// Discrete memoryless channel W(y|x) stored as a row-stochastic matrix.
/// Row a is the conditional pmf of the output given input symbol a.
class Channel {
 public:
  /// Validates and wraps `rows`. Entries are kept as given, never renormalized.
  static Channel from_rows(const std::vector<std::vector<double>>& rows);

  /// Binary symmetric channel with crossover probability p.
  static Channel bsc(double p);
  /// Binary erasure channel; output 2 is the erasure symbol.
  static Channel bec(double erasure);

  std::size_t input_size() const noexcept { return inputs_; }
  std::size_t output_size() const noexcept { return outputs_; }

  double operator()(Symbol x, Symbol y) const { return matrix_[x * outputs_ + y]; }
  std::span<const double> row(Symbol x) const {
    return {matrix_.data() + x * outputs_, outputs_};
  }
  /// Row-major |X|x|Y| storage.
  std::span<const double> data() const noexcept { return matrix_; }

  /// Output-major copy: element [y * |X| + x] = W(y|x).
  std::vector<double> transposed() const;

 private:
  Channel(std::size_t inputs, std::size_t outputs, std::vector<double> matrix)
      : inputs_(inputs), outputs_(outputs), matrix_(std::move(matrix)) {}

  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> matrix_;
};

/// Checks rectangularity, nonnegativity, unit row sums (1e-12) and alphabet
/// sizes; throws Error otherwise.
Channel validate_channel(const std::vector<std::vector<double>>& rows);

/// Parses a channel file: {"inputs": int, "outputs": int, "matrix": [[...], ...]}.
Channel parse_channel_json(const std::string& text);
Channel load_channel(const std::string& path);

/// Symmetric |X|x|X| table of single-letter Bhattacharyya coefficients.
class BhattMatrix {
 public:
  explicit BhattMatrix(const Channel& ch);

  std::size_t size() const noexcept { return size_; }
  double operator()(Symbol a, Symbol b) const { return z_[a * size_ + b]; }
  /// Row-major storage, used directly as a kernel lookup table.
  std::span<const double> data() const noexcept { return z_; }

 private:
  std::size_t size_;
  std::vector<double> z_;
};

double bhattacharyya(const Channel& ch, Symbol a, Symbol b);
BhattMatrix bhattacharyya_matrix(const Channel& ch);

/// Z_n(x, x2) for a memoryless channel: product of per-position coefficients.
double bhattacharyya_seq(const BhattMatrix& bm, std::span<const Symbol> x,
                         std::span<const Symbol> x2);

/// W^n(y|x) as the product of per-letter transitions.
double sequence_likelihood(const Channel& ch, std::span<const Symbol> x,
                           std::span<const Symbol> y);

}  // namespace expu
