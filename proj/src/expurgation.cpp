#include "expu/expurgation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "expu/error.hpp"
#include "expu/kernels.hpp"
#include "numeric.hpp"

namespace expu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;
constexpr double kMaxOutputLog2 = 20.0;

std::vector<std::int32_t> as_ref(std::span<const Symbol> x) { return {x.begin(), x.end()}; }

void check_index(const Codebook& code, std::size_t m) {
  if (m >= code.size()) throw Error(ErrorCode::IndexOutOfRange, "codeword index " + std::to_string(m));
}

void check_alphabet(const Codebook& code, std::size_t inputs) {
  if (code.spec().input_size() != inputs) {
    throw Error(ErrorCode::LengthMismatch, "codebook alphabet differs from channel input alphabet");
  }
}

double bound_from_products(std::span<const double> products, std::size_t count, std::size_t m) {
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < count; ++k) {
    if (k != m) sum.add(products[k]);
  }
  return sum.value();
}

}  // namespace

Method parse_method(const std::string& text) {
  if (text == "ub") return Method::UnionBound;
  if (text == "exact") return Method::ExactMl;
  throw Error(ErrorCode::ParseError, "method must be ub or exact, got \"" + text + "\"");
}

std::string to_string(Method m) { return m == Method::UnionBound ? "ub" : "exact"; }

double union_bhattacharyya_bound(const Codebook& code, std::size_t m, const BhattMatrix& bm) {
  check_index(code, m);
  check_alphabet(code, bm.size());
  const kernels::ColumnLayout cols(code.symbols(), code.size(), code.length());
  std::vector<double> products(cols.ld);
  const auto ref = as_ref(code.row(m));
  kernels::row_products({bm.data().data(), bm.size()}, ref, cols, products);
  return bound_from_products(products, code.size(), m);
}

std::vector<double> union_bhattacharyya_bounds(const Codebook& code, const BhattMatrix& bm) {
  check_alphabet(code, bm.size());
  const kernels::ColumnLayout cols(code.symbols(), code.size(), code.length());
  std::vector<double> products(cols.ld);
  std::vector<double> bounds(code.size());
  const kernels::TableView table{bm.data().data(), bm.size()};
  for (std::size_t m = 0; m < code.size(); ++m) {
    const auto ref = as_ref(code.row(m));
    kernels::row_products(table, ref, cols, products);
    bounds[m] = bound_from_products(products, code.size(), m);
  }
  return bounds;
}

std::vector<double> exact_ml_errors(const Codebook& code, const Channel& ch) {
  check_alphabet(code, ch.input_size());
  const std::size_t n = code.length();
  const std::size_t outputs = ch.output_size();
  if (static_cast<double>(n) * std::log2(static_cast<double>(outputs)) > kMaxOutputLog2 + 1e-9) {
    throw Error(ErrorCode::BudgetExceeded, "|Y|^n exceeds 2^20");
  }
  const std::size_t count = code.size();
  const kernels::ColumnLayout cols(code.symbols(), count, n);
  const std::vector<double> w_t = ch.transposed();
  const kernels::TableView table{w_t.data(), ch.input_size()};

  std::vector<double> likelihood(cols.ld);
  std::vector<detail::CompensatedSum> error(count);
  std::vector<std::int32_t> y(n, 0);
  while (true) {
    kernels::row_products(table, y, cols, likelihood);
    std::size_t decoded = 0;
    for (std::size_t k = 1; k < count; ++k) {
      if (likelihood[k] > likelihood[decoded] * (1.0 + kTieTolerance)) decoded = k;
    }
    for (std::size_t m = 0; m < count; ++m) {
      if (m != decoded && likelihood[m] > 0.0) error[m].add(likelihood[m]);
    }
    // Next y in lexicographic order.
    std::size_t i = n;
    while (i > 0 && y[i - 1] + 1 == static_cast<std::int32_t>(outputs)) y[--i] = 0;
    if (i == 0) break;
    ++y[i - 1];
  }
  std::vector<double> pe(count);
  for (std::size_t m = 0; m < count; ++m) pe[m] = std::clamp(error[m].value(), 0.0, 1.0);
  return pe;
}

double exact_ml_error(const Codebook& code, std::size_t m, const Channel& ch) {
  check_index(code, m);
  return exact_ml_errors(code, ch)[m];
}

double codeword_exponent(double pe, std::size_t n) {
  if (!(pe >= 0.0)) throw Error(ErrorCode::InvalidConfig, "error probability must be >= 0");
  if (pe == 0.0) return kInf;
  const double e = -std::log2(pe) / static_cast<double>(n);
  return e == 0.0 ? 0.0 : e;  // no -0.0
}

std::vector<CodewordEval> evaluate_codebook(const Codebook& code, const Channel& ch, const BhattMatrix& bm,
                                            Method method) {
  const auto bounds = union_bhattacharyya_bounds(code, bm);
  std::vector<double> exact;
  if (method == Method::ExactMl) exact = exact_ml_errors(code, ch);
  std::vector<CodewordEval> evals(code.size());
  for (std::size_t m = 0; m < code.size(); ++m) {
    auto& e = evals[m];
    e.m = m;
    e.pe_bound = bounds[m];
    if (method == Method::ExactMl) e.pe_exact = exact[m];
    const double pe = method == Method::ExactMl ? exact[m] : bounds[m];
    e.exponent = codeword_exponent(pe, code.length());
    e.infinite = pe == 0.0;
  }
  return evals;
}

std::uint64_t required_count(std::uint64_t m_n, double eps1) {
  return detail::guarded_ceil(static_cast<double>(m_n) * (1.0 + eps1));
}

TrialCensus census(const std::vector<CodewordEval>& evals, double threshold, std::uint64_t m_n, double eps1) {
  if (!(eps1 >= 0.0)) throw Error(ErrorCode::InvalidConfig, "eps1 must be >= 0");
  TrialCensus c;
  c.threshold = threshold;
  c.m_n = m_n;
  c.eps1 = eps1;
  c.phi.resize(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i) {
    c.phi[i] = evals[i].exponent > threshold;
    c.big_phi += c.phi[i] ? 1 : 0;
  }
  c.big_psi = evals.size() - c.big_phi;
  c.pass = c.big_phi >= required_count(m_n, eps1);
  return c;
}

bool is_good_mother_code(const TrialCensus& c) { return c.big_phi >= c.m_n; }

ExpurgatedCode expurgate(const Codebook& code, const std::vector<CodewordEval>& evals, std::size_t keep) {
  if (keep > evals.size()) throw Error(ErrorCode::KeepTooLarge, "cannot keep more codewords than the code has");
  std::vector<std::size_t> order(evals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return evals[a].exponent > evals[b].exponent; });
  ExpurgatedCode out;
  out.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(out.kept.begin(), out.kept.end());
  out.min_exponent = kInf;
  for (std::size_t m : out.kept) out.min_exponent = std::min(out.min_exponent, evals[m].exponent);
  out.achieved_rate = keep == 0 ? 0.0 : std::log2(static_cast<double>(keep)) / static_cast<double>(code.length());
  return out;
}

}  // namespace expu
