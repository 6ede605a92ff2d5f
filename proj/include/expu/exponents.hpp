#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "expu/channel.hpp"
#include "expu/distribution.hpp"
#include "expu/ensembles.hpp"

namespace expu {

// All exponents and rates are in bits per channel use.

/// E_x(rho, Q) = -rho log2 sum_{a,b} Q(a) Q(b) Z(a,b)^{1/rho}, rho >= 1.
double ex_single_letter(double rho, const InputDistribution& q, const BhattMatrix& bm);

/// The same quantity for an n-letter ensemble by enumerating all pairs of
/// sequences; the oracle for ex_single_letter and the only route for
/// constant-composition ensembles. Requires |X|^{2n} <= 2^24.
double ex_multi_letter_exact(double rho, const EnsembleKind& kind, const BhattMatrix& bm, std::size_t n);

/// Gallager's E_0(rho, Q) for rho in [0, 1].
double gallager_e0(double rho, const InputDistribution& q, const Channel& ch);

struct RandomCodingExponent {
  double rho_star;
  double e_r;
};

/// max over rho in [0,1] of E_0(rho) - rho * rate.
RandomCodingExponent random_coding_exponent(double rate, const InputDistribution& q, const Channel& ch);

struct ExponentSolution {
  double rate = 0.0;
  double rho_hat = 1.0;
  double ex_value = 0.0;  // E_x(rho_hat)
  double e_ex = 0.0;      // ex_value - rho_hat * rate
  bool capped = false;    // maximizer sits at rho_max
  double s = 1.0;         // 1 / rho_hat
};

inline constexpr double kDefaultRhoMax = 64.0;
inline constexpr double kRhoTolerance = 1e-6;

/// Expurgated exponent at `rate`: maximizes E_x(rho) - rho * rate over
/// [1, rho_max]. `capped` reports a maximizer within 10 * kRhoTolerance of
/// rho_max, i.e. the true optimum may lie beyond the search range.
ExponentSolution optimize_rho(double rate, const InputDistribution& q, const BhattMatrix& bm,
                              double rho_max = kDefaultRhoMax);

/// Confidence sequence gamma_n. SqrtExp is 2^sqrt(n), Poly is n^k. Fixed
/// holds gamma constant and exists to reproduce the classical gamma = 2
/// argument; it violates gamma_n -> infinity.
struct GammaKind {
  enum class Type { SqrtExp, Poly, Fixed };
  Type type = Type::SqrtExp;
  double param = 0.0;  // k for Poly, gamma for Fixed

  static GammaKind sqrt_exp() { return {Type::SqrtExp, 0.0}; }
  static GammaKind poly(double k) { return {Type::Poly, k}; }
  static GammaKind fixed(double gamma) { return {Type::Fixed, gamma}; }

  /// "sqrt-exp", "poly:k" or "fixed:g".
  static GammaKind parse(const std::string& text);
  std::string to_string() const;

  double log2_gamma(std::size_t n) const;
};

struct Schedule {
  std::size_t n = 0;
  GammaKind gamma_kind;
  double log2_gamma = 0.0;
  double gamma = 1.0;          // may be +inf for huge n; use log2_gamma
  double delta = 0.0;          // (rho_hat / n) log2 gamma
  double lemma_bound = 0.0;    // 1 - 1/gamma
  double theorem_bound = 0.0;  // 1 - 1/sqrt(gamma)
};

Schedule schedule(std::size_t n, double rho_hat, GammaKind kind);

/// Smallest n with (eps - eps1) sqrt(gamma_n) > 1 + eps. Throws
/// NoConvergence when no n below 2^31 qualifies.
std::uint64_t n0_threshold(double eps, double eps1, GammaKind kind);

}  // namespace expu
