#include "expu/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "expu/error.hpp"
#include "expu/random.hpp"
#include "numeric.hpp"

namespace expu {

namespace {

constexpr double kMaxLog2Size = 40.0;

using detail::guarded_ceil;

}  // namespace

CodebookSize codebook_size(double rate, std::size_t n, double eps) {
  if (!(rate >= 0.0) || n == 0 || !(eps >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "codebook_size needs rate >= 0, n >= 1, eps >= 0");
  }
  const double log2_m = static_cast<double>(n) * rate;
  if (log2_m > kMaxLog2Size) throw Error(ErrorCode::SizeOverflow, "n*rate exceeds 40 bits");

  std::uint64_t m_n = 0;
  const double whole = std::round(log2_m);
  if (std::abs(log2_m - whole) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, log2_m)) {
    m_n = std::uint64_t{1} << static_cast<unsigned>(whole);
  } else {
    m_n = guarded_ceil(std::exp2(log2_m));
  }
  std::uint64_t m_prime = guarded_ceil(static_cast<double>(m_n) * (1.0 + eps));
  if (eps > 0.0) m_prime = std::max(m_prime, m_n + 1);
  return {m_n, m_prime};
}

EnsembleSpec EnsembleSpec::make(EnsembleKind kind, std::size_t n, double rate, double eps) {
  if (const auto* cc = std::get_if<ConstantComposition>(&kind)) {
    if (std::accumulate(cc->counts.begin(), cc->counts.end(), std::size_t{0}) != n) {
      throw Error(ErrorCode::InvalidConfig, "composition counts must sum to n");
    }
  }
  const auto size = codebook_size(rate, n, eps);
  return EnsembleSpec{std::move(kind), n, rate, eps, size.m_n, size.m_prime};
}

EnsembleSpec EnsembleSpec::classical(EnsembleKind kind, std::size_t n, double rate) {
  auto spec = make(std::move(kind), n, rate, 0.0);
  spec.m_prime = 2 * spec.m_n - 1;
  spec.eps = static_cast<double>(spec.m_prime) / static_cast<double>(spec.m_n) - 1.0;
  return spec;
}

std::size_t EnsembleSpec::input_size() const {
  return std::visit(
      [](const auto& k) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Iid>) {
          return k.q.size();
        } else {
          return k.counts.size();
        }
      },
      kind);
}

std::vector<std::size_t> nearest_composition(const InputDistribution& q, std::size_t n) {
  const std::size_t k = q.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const double target = q[a] * static_cast<double>(n);
    counts[a] = static_cast<std::size_t>(std::floor(target));
    remainder[a] = target - static_cast<double>(counts[a]);
    assigned += counts[a];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Rounding can push the floor total above n when Q sums to 1 - 1e-13ish.
  while (assigned > n) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  for (std::size_t i = 0; assigned < n; i = (i + 1) % k) {
    ++counts[order[i]];
    ++assigned;
  }
  return counts;
}

Codebook::Codebook(EnsembleSpec spec, std::vector<Symbol> rows, std::uint64_t seed, std::uint64_t trial_id)
    : spec_(std::move(spec)), rows_(std::move(rows)), seed_(seed), trial_id_(trial_id) {
  if (rows_.size() != spec_.m_prime * spec_.n) throw Error(ErrorCode::LengthMismatch, "codebook shape");
  const std::size_t alphabet = spec_.input_size();
  for (Symbol s : rows_) {
    if (s >= alphabet) throw Error(ErrorCode::IndexOutOfRange, "codeword symbol out of range");
  }
}

Codebook Codebook::from_rows(const std::vector<std::vector<Symbol>>& rows, std::size_t input_size) {
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::InvalidConfig, "empty code");
  const std::size_t n = rows.front().size();
  std::vector<Symbol> flat;
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorCode::LengthMismatch, "codewords differ in length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  EnsembleSpec spec{Iid{InputDistribution::uniform(input_size)}, n, 0.0, 0.0, rows.size(), rows.size()};
  return Codebook(std::move(spec), std::move(flat), 0, 0);
}

Codebook sample_codebook(const EnsembleSpec& spec, std::uint64_t master_seed, std::uint64_t trial_id) {
  Rng rng(stream_seed(master_seed, trial_id));
  const std::size_t n = spec.n;
  std::vector<Symbol> rows(spec.m_prime * n);

  if (const auto* iid = std::get_if<Iid>(&spec.kind)) {
    const auto pmf = iid->q.pmf();
    std::vector<double> cdf(pmf.size());
    std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
    // Last symbol with positive mass absorbs the rounding gap of the cdf.
    std::size_t last = pmf.size() - 1;
    while (last > 0 && pmf[last] == 0.0) --last;
    for (auto& s : rows) {
      const double u = rng.uniform();
      std::size_t a = 0;
      while (a < last && !(u < cdf[a])) ++a;
      s = static_cast<Symbol>(a);
    }
  } else {
    const auto& counts = std::get<ConstantComposition>(spec.kind).counts;
    std::vector<Symbol> base;
    base.reserve(n);
    for (std::size_t a = 0; a < counts.size(); ++a) base.insert(base.end(), counts[a], static_cast<Symbol>(a));
    for (std::size_t m = 0; m < spec.m_prime; ++m) {
      Symbol* row = rows.data() + m * n;
      std::copy(base.begin(), base.end(), row);
      for (std::size_t i = n; i > 1; --i) {
        std::swap(row[i - 1], row[rng.below(i)]);
      }
    }
  }
  return Codebook(spec, std::move(rows), master_seed, trial_id);
}

}  // namespace expu
