#include "expu/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "expu/error.hpp"
#include "expu/golden.hpp"
#include "numeric.hpp"

namespace expu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kEnumerationBudgetLog2 = 24;

void check_sizes(std::size_t q_size, const BhattMatrix& bm) {
  if (q_size != bm.size()) throw Error(ErrorCode::LengthMismatch, "distribution and channel alphabets differ");
}

// Probability of every sequence in X^n under the ensemble, indexed by the
// base-|X| number whose most significant digit is position 0.
std::vector<double> sequence_law(const EnsembleKind& kind, std::size_t alphabet, std::size_t n,
                                 std::size_t count) {
  std::vector<double> law(count);
  std::vector<std::size_t> digits(n);
  const auto* iid = std::get_if<Iid>(&kind);
  const auto* cc = std::get_if<ConstantComposition>(&kind);

  std::size_t type_class_size = 0;
  std::vector<std::size_t> hist(alphabet);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      digits[i] = rest % alphabet;
      rest /= alphabet;
    }
    if (iid) {
      double p = 1.0;
      for (std::size_t a : digits) p *= iid->q[a];
      law[idx] = p;
    } else {
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t a : digits) ++hist[a];
      const bool member = std::equal(hist.begin(), hist.end(), cc->counts.begin());
      law[idx] = member ? 1.0 : 0.0;
      type_class_size += member ? 1 : 0;
    }
  }
  if (cc) {
    for (double& p : law) p /= static_cast<double>(type_class_size);
  }
  return law;
}

}  // namespace

double ex_single_letter(double rho, const InputDistribution& q, const BhattMatrix& bm) {
  if (!(rho >= 1.0)) throw Error(ErrorCode::RhoOutOfRange, "rho must be >= 1");
  check_sizes(q.size(), bm);
  // sum Q Q z^{1/rho} is close to 1 for large rho, so accumulate the
  // deviation from 1 through expm1 and take log1p.
  double mass = 0.0;
  double deviation = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    for (std::size_t b = 0; b < q.size(); ++b) {
      const double w = q[a] * q[b];
      if (w == 0.0) continue;
      const double z = bm(static_cast<Symbol>(a), static_cast<Symbol>(b));
      mass += w;
      deviation += w * std::expm1(std::log(z) / rho);
    }
  }
  if (mass + deviation <= 0.0) return kInf;
  const double log_sum = std::log(mass) + std::log1p(deviation / mass);
  return -rho * log_sum / std::numbers::ln2;
}

double ex_multi_letter_exact(double rho, const EnsembleKind& kind, const BhattMatrix& bm, std::size_t n) {
  if (!(rho >= 1.0)) throw Error(ErrorCode::RhoOutOfRange, "rho must be >= 1");
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
  const std::size_t alphabet = bm.size();
  if (const auto* iid = std::get_if<Iid>(&kind)) check_sizes(iid->q.size(), bm);
  if (const auto* cc = std::get_if<ConstantComposition>(&kind)) {
    check_sizes(cc->counts.size(), bm);
    std::size_t total = 0;
    for (auto c : cc->counts) total += c;
    if (total != n) throw Error(ErrorCode::InvalidConfig, "composition counts must sum to n");
  }
  const double log2_pairs = 2.0 * static_cast<double>(n) * std::log2(static_cast<double>(alphabet));
  if (log2_pairs > static_cast<double>(kEnumerationBudgetLog2) + 1e-9) {
    throw Error(ErrorCode::BudgetExceeded, "|X|^{2n} exceeds 2^24");
  }
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= alphabet;

  const auto law = sequence_law(kind, alphabet, n, count);
  std::vector<std::vector<Symbol>> seqs(count, std::vector<Symbol>(n));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      seqs[idx][i] = static_cast<Symbol>(rest % alphabet);
      rest /= alphabet;
    }
  }

  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < count; ++i) {
    if (law[i] == 0.0) continue;
    for (std::size_t j = 0; j < count; ++j) {
      if (law[j] == 0.0) continue;
      const double z = bhattacharyya_seq(bm, seqs[i], seqs[j]);
      const double term = law[i] * law[j] * std::pow(z, 1.0 / rho);
      sum.add(term);
    }
  }
  if (sum.value() <= 0.0) return kInf;
  return -rho * std::log2(sum.value()) / static_cast<double>(n);
}

double gallager_e0(double rho, const InputDistribution& q, const Channel& ch) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::RhoOutOfRange, "rho must lie in [0, 1]");
  if (q.size() != ch.input_size()) throw Error(ErrorCode::LengthMismatch, "distribution and channel alphabets differ");
  const double inv = 1.0 / (1.0 + rho);
  double total = 0.0;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    double inner = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a) {
      inner += q[a] * std::pow(ch(static_cast<Symbol>(a), static_cast<Symbol>(y)), inv);
    }
    total += std::pow(inner, 1.0 + rho);
  }
  return -std::log2(total);
}

RandomCodingExponent random_coding_exponent(double rate, const InputDistribution& q, const Channel& ch) {
  if (!(rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be >= 0");
  auto objective = [&](double rho) { return gallager_e0(rho, q, ch) - rho * rate; };
  auto best = golden_section_maximize(objective, 0.0, 1.0, 1e-9);
  // Objective is exactly 0 at rho = 0; anything below is rounding.
  if (best.value <= 0.0) return {0.0, 0.0};
  return {best.x, best.value};
}

ExponentSolution optimize_rho(double rate, const InputDistribution& q, const BhattMatrix& bm, double rho_max) {
  if (!(rho_max >= 1.0)) throw Error(ErrorCode::RhoMaxTooSmall, "rho_max must be >= 1");
  if (!(rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be >= 0");
  auto objective = [&](double rho) { return ex_single_letter(rho, q, bm) - rho * rate; };
  const auto best = golden_section_maximize(objective, 1.0, rho_max, kRhoTolerance);

  ExponentSolution sol;
  sol.rate = rate;
  sol.rho_hat = best.x;
  sol.ex_value = ex_single_letter(best.x, q, bm);
  sol.e_ex = sol.ex_value - sol.rho_hat * rate;
  sol.capped = rho_max - best.x <= 10.0 * kRhoTolerance;
  sol.s = 1.0 / sol.rho_hat;
  return sol;
}

GammaKind GammaKind::parse(const std::string& text) {
  if (text == "sqrt-exp") return sqrt_exp();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text.substr(colon + 1), &used);
      if (colon + 1 + used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad gamma parameter in \"" + text + "\"");
    }
    if (head == "poly" && value > 0.0) return poly(value);
    if (head == "fixed" && value > 1.0) return fixed(value);
  }
  throw Error(ErrorCode::ParseError, "gamma must be sqrt-exp, poly:k (k > 0) or fixed:g (g > 1), got \"" + text + "\"");
}

std::string GammaKind::to_string() const {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    return s;
  };
  switch (type) {
    case Type::SqrtExp: return "sqrt-exp";
    case Type::Poly: return "poly:" + num(param);
    case Type::Fixed: return "fixed:" + num(param);
  }
  return "?";
}

double GammaKind::log2_gamma(std::size_t n) const {
  const double nn = static_cast<double>(n);
  switch (type) {
    case Type::SqrtExp: return std::sqrt(nn);
    case Type::Poly: return param * std::log2(nn);
    case Type::Fixed: return std::log2(param);
  }
  return 0.0;
}

Schedule schedule(std::size_t n, double rho_hat, GammaKind kind) {
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
  Schedule s;
  s.n = n;
  s.gamma_kind = kind;
  s.log2_gamma = kind.log2_gamma(n);
  s.gamma = std::exp2(s.log2_gamma);
  s.delta = rho_hat * s.log2_gamma / static_cast<double>(n);
  s.lemma_bound = 1.0 - std::exp2(-s.log2_gamma);
  s.theorem_bound = 1.0 - std::exp2(-0.5 * s.log2_gamma);
  return s;
}

std::uint64_t n0_threshold(double eps, double eps1, GammaKind kind) {
  if (!(eps1 > 0.0 && eps1 < eps)) throw Error(ErrorCode::InvalidConfig, "need 0 < eps1 < eps");
  const double lhs_offset = std::log2(eps - eps1);
  const double rhs = std::log2(1.0 + eps);
  auto holds = [&](std::uint64_t n) {
    return lhs_offset + 0.5 * kind.log2_gamma(static_cast<std::size_t>(n)) > rhs;
  };
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 31;
  if (holds(1)) return 1;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (!holds(hi)) {
    lo = hi;
    hi *= 2;
    if (hi >= kLimit) {
      if (holds(kLimit - 1)) {
        hi = kLimit - 1;
        break;
      }
      throw Error(ErrorCode::NoConvergence, "no n below 2^31 satisfies the n0 condition");
    }
  }
  // Invariant: !holds(lo) && holds(hi).
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace expu
