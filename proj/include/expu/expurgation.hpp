#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "expu/channel.hpp"
#include "expu/ensembles.hpp"

namespace expu {

// Codeword indices are 0-based throughout.

enum class Method { UnionBound, ExactMl };

Method parse_method(const std::string& text);  // "ub" | "exact"
std::string to_string(Method m);

struct CodewordEval {
  std::size_t m = 0;
  double pe_bound = 0.0;             // may exceed 1
  std::optional<double> pe_exact;    // present for Method::ExactMl
  double exponent = 0.0;             // +inf when the evaluated pe is 0
  bool infinite = false;
};

/// sum_{k != m} Z_n(x_m, x_k).
double union_bhattacharyya_bound(const Codebook& code, std::size_t m, const BhattMatrix& bm);
/// The bound for every codeword, sharing one pass over the kernel layout.
std::vector<double> union_bhattacharyya_bounds(const Codebook& code, const BhattMatrix& bm);

/// Exact ML error probability of codeword m by enumerating Y^n (|Y|^n <= 2^20).
/// Ties go to the lowest index; likelihoods within a relative 1e-12 count as tied.
double exact_ml_error(const Codebook& code, std::size_t m, const Channel& ch);
std::vector<double> exact_ml_errors(const Codebook& code, const Channel& ch);

/// -(1/n) log2 pe, +inf for pe == 0. Negative when pe > 1.
double codeword_exponent(double pe, std::size_t n);

std::vector<CodewordEval> evaluate_codebook(const Codebook& code, const Channel& ch, const BhattMatrix& bm,
                                            Method method);

/// Smallest integer count >= m_n (1 + eps1).
std::uint64_t required_count(std::uint64_t m_n, double eps1);

struct TrialCensus {
  double threshold = 0.0;
  std::vector<bool> phi;
  std::uint64_t big_phi = 0;
  std::uint64_t big_psi = 0;
  std::uint64_t m_n = 0;
  double eps1 = 0.0;
  bool pass = false;
};

/// phi[m] = exponent_m > threshold (strict; +inf counts).
TrialCensus census(const std::vector<CodewordEval>& evals, double threshold, std::uint64_t m_n, double eps1);

/// Phi >= m_n: enough good codewords to expurgate down to M_n.
bool is_good_mother_code(const TrialCensus& c);

struct ExpurgatedCode {
  std::vector<std::size_t> kept;  // ascending
  double min_exponent = 0.0;
  double achieved_rate = 0.0;
};

/// Keeps the `keep` codewords with the largest exponents (ties to lower index).
ExpurgatedCode expurgate(const Codebook& code, const std::vector<CodewordEval>& evals, std::size_t keep);

}  // namespace expu
