#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "expu/channel.hpp"
#include "expu/distribution.hpp"

namespace expu {

struct Iid {
  InputDistribution q;
};

struct ConstantComposition {
  std::vector<std::size_t> counts;  // per input symbol, sums to n
};

using EnsembleKind = std::variant<Iid, ConstantComposition>;

struct CodebookSize {
  std::uint64_t m_n;
  std::uint64_t m_prime;
};

/// M_n = ceil(2^{n*rate}) and M'_n = ceil(M_n (1 + eps)); throws SizeOverflow
/// when n*rate > 40.
CodebookSize codebook_size(double rate, std::size_t n, double eps);

/// Random-code ensemble: codeword law plus mother-code sizing.
struct EnsembleSpec {
  EnsembleKind kind{ConstantComposition{}};
  std::size_t n = 0;
  double rate = 0.0;
  double eps = 0.0;
  std::uint64_t m_n = 0;
  std::uint64_t m_prime = 0;

  /// Mother code of ceil(M_n (1 + eps)) codewords.
  static EnsembleSpec make(EnsembleKind kind, std::size_t n, double rate, double eps);
  /// The classical worst-half construction: 2 M_n - 1 codewords.
  static EnsembleSpec classical(EnsembleKind kind, std::size_t n, double rate);

  std::size_t input_size() const;
};

/// Largest-remainder rounding of n*Q; ties go to the lower symbol index.
std::vector<std::size_t> nearest_composition(const InputDistribution& q, std::size_t n);

class Codebook {
 public:
  Codebook(EnsembleSpec spec, std::vector<Symbol> rows, std::uint64_t seed, std::uint64_t trial_id);
  /// A fixed code, mostly for tests. All rows must share one length.
  static Codebook from_rows(const std::vector<std::vector<Symbol>>& rows, std::size_t input_size);

  const EnsembleSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.m_prime; }
  std::size_t length() const noexcept { return spec_.n; }
  std::span<const Symbol> row(std::size_t m) const { return {rows_.data() + m * spec_.n, spec_.n}; }
  std::span<const Symbol> symbols() const noexcept { return rows_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t trial_id() const noexcept { return trial_id_; }

 private:
  EnsembleSpec spec_;
  std::vector<Symbol> rows_;  // m_prime x n, row-major
  std::uint64_t seed_;
  std::uint64_t trial_id_;
};

/// Draws a mother code whose codewords are mutually independent. The stream
/// is a function of (master_seed, trial_id) only; see stream_seed().
Codebook sample_codebook(const EnsembleSpec& spec, std::uint64_t master_seed, std::uint64_t trial_id);

}  // namespace expu
