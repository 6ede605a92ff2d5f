#include <doctest.h>

#include <cmath>
#include <map>

#include "expu/ensembles.hpp"
#include "expu/error.hpp"

using namespace expu;

TEST_CASE("codebook_size") {
  auto s = codebook_size(0.5, 10, 0.1);
  CHECK(s.m_n == 32);
  CHECK(s.m_prime == 36);
  s = codebook_size(0.0, 10, 0.5);
  CHECK(s.m_n == 1);
  CHECK(s.m_prime == 2);
  s = codebook_size(0.05, 120, 0.1);
  CHECK(s.m_n == 64);
  CHECK(s.m_prime == 71);
  // 10 * 1.1 is 11.000000000000002 in binary64; must not round up to 12.
  s = codebook_size(std::log2(10.0) / 1.0, 1, 0.1);
  CHECK(s.m_n == 10);
  CHECK(s.m_prime == 11);
  CHECK(codebook_size(0.3, 10, 0.0).m_n == 8);  // 0.3 * 10 is 3.0000000000000004
  CHECK(codebook_size(0.25, 10, 0.0).m_n == 6);  // ceil(5.66)
  CHECK(codebook_size(1.0, 40, 0.0).m_n == (std::uint64_t{1} << 40));
  try {
    codebook_size(1.0, 41, 0.1);
    FAIL("expected SizeOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeOverflow);
  }
  CHECK(codebook_size(0.1, 30, 1e-15).m_prime == 9);  // m_prime > m_n for any eps > 0
}

TEST_CASE("nearest_composition") {
  const auto u = InputDistribution::uniform(2);
  CHECK(nearest_composition(u, 4) == std::vector<std::size_t>{2, 2});
  CHECK(nearest_composition(u, 5) == std::vector<std::size_t>{3, 2});
  CHECK(nearest_composition(InputDistribution({0.6, 0.4}), 5) == std::vector<std::size_t>{3, 2});
  const auto c = nearest_composition(InputDistribution({0.2, 0.3, 0.5}), 7);
  CHECK(c[0] + c[1] + c[2] == 7);
}

TEST_CASE("sample_codebook determinism and constraints") {
  const auto spec = EnsembleSpec::make(Iid{InputDistribution::uniform(2)}, 2, 0.0, 1.0);
  CHECK(spec.m_prime == 2);
  const auto a = sample_codebook(spec, 42, 7);
  const auto b = sample_codebook(spec, 42, 7);
  const auto c = sample_codebook(EnsembleSpec::make(Iid{InputDistribution::uniform(2)}, 64, 0.0, 1.0), 42, 8);
  CHECK(std::equal(a.symbols().begin(), a.symbols().end(), b.symbols().begin(), b.symbols().end()));
  CHECK(c.size() == 2);

  const auto cc = EnsembleSpec::make(ConstantComposition{{1, 1}}, 2, 1.0, 0.5);
  const auto code = sample_codebook(cc, 3, 0);
  for (std::size_t m = 0; m < code.size(); ++m) CHECK(code.row(m)[0] + code.row(m)[1] == 1);

  const auto big_cc = EnsembleSpec::make(ConstantComposition{{3, 5, 2}}, 10, 0.5, 0.1);
  const auto big = sample_codebook(big_cc, 9, 1);
  for (std::size_t m = 0; m < big.size(); ++m) {
    std::vector<std::size_t> hist(3);
    for (Symbol s : big.row(m)) ++hist[s];
    CHECK(hist == std::vector<std::size_t>{3, 5, 2});
  }

  const auto degenerate = EnsembleSpec::make(Iid{InputDistribution({1.0, 0.0})}, 16, 0.25, 0.1);
  const auto zeros = sample_codebook(degenerate, 1, 1);
  for (Symbol s : zeros.symbols()) CHECK(s == 0);
  const auto last = EnsembleSpec::make(Iid{InputDistribution({0.0, 0.0, 1.0})}, 16, 0.25, 0.1);
  const auto twos = sample_codebook(last, 1, 1);
  for (Symbol s : twos.symbols()) CHECK(s == 2);

  CHECK_THROWS_AS(EnsembleSpec::make(ConstantComposition{{1, 2}}, 2, 0.5, 0.1), Error);
}

TEST_CASE("classical mother code has 2M - 1 codewords") {
  const auto spec = EnsembleSpec::classical(Iid{InputDistribution::uniform(2)}, 60, 0.05);
  CHECK(spec.m_n == 8);
  CHECK(spec.m_prime == 15);
}

TEST_CASE("i.i.d. codewords are pairwise independent (n = 1)") {
  const auto spec = EnsembleSpec::make(Iid{InputDistribution::uniform(2)}, 1, 0.0, 1.0);
  constexpr int kSamples = 100000;
  std::map<std::pair<Symbol, Symbol>, int> joint;
  for (int t = 0; t < kSamples; ++t) {
    const auto code = sample_codebook(spec, 2024, static_cast<std::uint64_t>(t));
    ++joint[{code.row(0)[0], code.row(1)[0]}];
  }
  const double se = std::sqrt(0.25 * 0.75 / kSamples);
  for (Symbol a = 0; a < 2; ++a) {
    for (Symbol b = 0; b < 2; ++b) {
      const double freq = static_cast<double>(joint[{a, b}]) / kSamples;
      CHECK(std::abs(freq - 0.25) < 4 * se);
    }
  }
}

TEST_CASE("constant-composition arrangements are uniform") {
  const auto spec = EnsembleSpec::make(ConstantComposition{{1, 1}}, 2, 0.0, 1.0);
  constexpr int kSamples = 10000;
  int first_zero = 0;
  int rows = 0;
  for (int t = 0; t < kSamples; ++t) {
    const auto code = sample_codebook(spec, 99, static_cast<std::uint64_t>(t));
    for (std::size_t m = 0; m < code.size(); ++m, ++rows) first_zero += code.row(m)[0] == 0 ? 1 : 0;
  }
  const double freq = static_cast<double>(first_zero) / rows;
  CHECK(std::abs(freq - 0.5) < 4 * std::sqrt(0.25 / rows));
}
