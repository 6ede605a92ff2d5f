#include <doctest.h>

#include <cmath>
#include <random>

#include "expu/error.hpp"
#include "expu/exponents.hpp"
#include "oracles.hpp"

using namespace expu;

namespace {

const Channel kBsc = Channel::bsc(0.1);
const BhattMatrix kBscZ(kBsc);
const Channel kNoiseless = validate_channel({{1.0, 0.0}, {0.0, 1.0}});
const BhattMatrix kNoiselessZ(kNoiseless);
const InputDistribution kUniform = InputDistribution::uniform(2);

// Frozen from a 30-digit evaluation of the closed forms.
constexpr double kExBscRho1 = 0.321928094887362347870;  // -log2(0.8)
constexpr double kExBscRho2 = 0.345017668405278821449;  // -2 log2(0.5 + 0.5 sqrt(0.6))
constexpr double kExBscCcN2 = 0.278196674262192643743;  // -(1/2) log2(0.68)
constexpr double kExBscLimit = 0.368482797083103083208;  // -(1/2) log2(0.6)

}  // namespace

TEST_CASE("ex_single_letter reference values") {
  CHECK(ex_single_letter(1.0, kUniform, kBscZ) == doctest::Approx(kExBscRho1).epsilon(1e-14));
  CHECK(ex_single_letter(2.0, kUniform, kBscZ) == doctest::Approx(kExBscRho2).epsilon(1e-14));
  CHECK(ex_single_letter(3.0, kUniform, kNoiselessZ) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ex_single_letter(1e3, kUniform, kBscZ) == doctest::Approx(kExBscLimit).epsilon(1e-3));
  CHECK_THROWS_AS(ex_single_letter(0.5, kUniform, kBscZ), Error);
}

TEST_CASE("ex_multi_letter_exact matches single-letter for i.i.d. ensembles") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (double rho : {1.0, 1.5, 2.0, 5.0}) {
      CHECK(ex_multi_letter_exact(rho, Iid{kUniform}, kBscZ, n) ==
            doctest::Approx(ex_single_letter(rho, kUniform, kBscZ)).epsilon(1e-9));
    }
  }
  CHECK(ex_multi_letter_exact(1.0, Iid{kUniform}, kNoiselessZ, 1) == doctest::Approx(1.0));
  CHECK(ex_multi_letter_exact(1.0, ConstantComposition{{1, 1}}, kBscZ, 2) ==
        doctest::Approx(kExBscCcN2).epsilon(1e-12));
  CHECK_THROWS_AS(ex_multi_letter_exact(1.0, Iid{kUniform}, kBscZ, 13), Error);
  try {
    ex_multi_letter_exact(1.0, Iid{kUniform}, kBscZ, 13);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
}

TEST_CASE("gallager_e0 values") {
  CHECK(gallager_e0(0.0, kUniform, kBsc) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gallager_e0(1.0, kUniform, kBsc) == doctest::Approx(kExBscRho1).epsilon(1e-12));
  CHECK(gallager_e0(1.0, kUniform, kNoiseless) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gallager_e0(1.5, kUniform, kBsc), Error);
}

TEST_CASE("E_x(1, Q) equals E_0(1, Q) on random channels") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t nx = 2 + t % 5;
    const std::size_t ny = 2 + (t / 5) % 5;
    const auto ch = validate_channel(oracle::random_stochastic(rng, nx, ny, 0.2));
    const InputDistribution q(oracle::random_pmf(rng, nx));
    CHECK(ex_single_letter(1.0, q, BhattMatrix(ch)) == doctest::Approx(gallager_e0(1.0, q, ch)).epsilon(1e-9));
  }
}

TEST_CASE("E_x is nondecreasing in rho and E_x / rho nonincreasing") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const std::size_t nx = 2 + t % 3;
    const auto ch = validate_channel(oracle::random_stochastic(rng, nx, 3));
    const BhattMatrix bm(ch);
    const InputDistribution q(oracle::random_pmf(rng, nx));
    double prev = ex_single_letter(1.0, q, bm);
    for (double rho = 1.5; rho <= 64.0; rho *= 1.5) {
      const double cur = ex_single_letter(rho, q, bm);
      CHECK(cur >= prev - 1e-12);
      CHECK(cur / rho <= prev / (rho / 1.5) + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("random_coding_exponent") {
  const auto low = random_coding_exponent(0.05, kUniform, kBsc);
  const auto grid = oracle::grid_max([&](double r) { return gallager_e0(r, kUniform, kBsc) - 0.05 * r; }, 0, 1, 1e-4);
  CHECK(grid.x == 1.0);
  CHECK(low.rho_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(low.e_r == doctest::Approx(kExBscRho1 - 0.05).epsilon(1e-9));

  const auto above = random_coding_exponent(1.0, kUniform, kBsc);  // above capacity 0.531
  CHECK(above.e_r == 0.0);
  CHECK(above.rho_star == 0.0);

  const auto clean = random_coding_exponent(0.5, kUniform, kNoiseless);
  CHECK(clean.rho_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(clean.e_r == doctest::Approx(0.5).epsilon(1e-9));

  // Interior maximizer near capacity agrees with the grid.
  const auto mid = random_coding_exponent(0.3, kUniform, kBsc);
  const auto mid_grid =
      oracle::grid_max([&](double r) { return gallager_e0(r, kUniform, kBsc) - 0.3 * r; }, 0, 1, 1e-4);
  CHECK(mid.e_r == doctest::Approx(mid_grid.value).epsilon(1e-7));
  CHECK(mid.rho_star == doctest::Approx(mid_grid.x).epsilon(2e-4));
}

TEST_CASE("optimize_rho") {
  const auto boundary = optimize_rho(0.05, kUniform, kBscZ, 64.0);
  CHECK(boundary.rho_hat == 1.0);
  CHECK(boundary.e_ex == doctest::Approx(kExBscRho1 - 0.05).epsilon(1e-12));
  CHECK_FALSE(boundary.capped);

  auto objective = [](double rate) {
    return [rate](double r) { return ex_single_letter(r, kUniform, kBscZ) - r * rate; };
  };
  const auto low = optimize_rho(0.01, kUniform, kBscZ, 64.0);
  const auto grid = oracle::grid_max(objective(0.01), 1.0, 64.0, 1e-3);
  CHECK(low.rho_hat == doctest::Approx(2.2).epsilon(0.05));
  CHECK(low.e_ex == doctest::Approx(grid.value).epsilon(1e-3));
  CHECK(std::abs(low.e_ex - 0.325) < 1e-3);
  CHECK_FALSE(low.capped);
  CHECK(low.e_ex >= objective(0.01)(1.0));
  CHECK(low.e_ex >= objective(0.01)(64.0));

  const auto capped = optimize_rho(0.5, kUniform, kNoiselessZ, 64.0);
  CHECK(capped.rho_hat == 64.0);
  CHECK(capped.capped);

  // Solution invariants.
  for (const auto& s : {boundary, low, capped}) {
    CHECK(s.rho_hat >= 1.0);
    CHECK(s.e_ex == s.ex_value - s.rho_hat * s.rate);
    CHECK(s.s * s.rho_hat == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(optimize_rho(0.05, kUniform, kBscZ, 0.5), Error);

  // Strictly above the random-coding exponent at low rate.
  CHECK(optimize_rho(0.001, kUniform, kBscZ).e_ex > random_coding_exponent(0.001, kUniform, kBsc).e_r);
}

TEST_CASE("schedule arithmetic") {
  const auto s = schedule(100, 2.0, GammaKind::sqrt_exp());
  CHECK(s.gamma == 1024.0);
  CHECK(s.delta == doctest::Approx(0.2));
  CHECK(s.lemma_bound == doctest::Approx(1.0 - 1.0 / 1024));
  CHECK(s.theorem_bound == 0.96875);

  const auto p = schedule(16, 1.0, GammaKind::poly(2));
  CHECK(p.gamma == doctest::Approx(256.0));
  CHECK(p.delta == doctest::Approx(0.5));
  CHECK(p.lemma_bound == doctest::Approx(0.99609375));

  CHECK(schedule(400, 1.5, GammaKind::sqrt_exp()).delta ==
        doctest::Approx(schedule(100, 1.5, GammaKind::sqrt_exp()).delta / 2));

  // log2(gamma)/n decreasing, bounds in (0,1), for both kinds.
  for (const auto kind : {GammaKind::sqrt_exp(), GammaKind::poly(3)}) {
    double prev = 1e9;
    for (std::size_t n = 8; n <= 1024; n *= 2) {  // 1 - 2^-sqrt(n) rounds to 1 past here
      const auto sc = schedule(n, 1.0, kind);
      CHECK(sc.gamma > 1.0);
      CHECK(sc.delta >= 0.0);
      CHECK(sc.lemma_bound > 0.0);
      CHECK(sc.lemma_bound < 1.0);
      CHECK(sc.theorem_bound > 0.0);
      CHECK(sc.theorem_bound < 1.0);
      CHECK(sc.log2_gamma / static_cast<double>(n) < prev);
      prev = sc.log2_gamma / static_cast<double>(n);
    }
  }
}

TEST_CASE("gamma kind parsing") {
  CHECK(GammaKind::parse("sqrt-exp").type == GammaKind::Type::SqrtExp);
  CHECK(GammaKind::parse("poly:3").param == 3.0);
  CHECK(GammaKind::parse("fixed:2").log2_gamma(50) == 1.0);
  CHECK(GammaKind::parse("poly:2.5").to_string() == "poly:2.5");
  CHECK_THROWS_AS(GammaKind::parse("poly:"), Error);
  CHECK_THROWS_AS(GammaKind::parse("fixed:1"), Error);
  CHECK_THROWS_AS(GammaKind::parse("exp"), Error);
}

TEST_CASE("n0_threshold") {
  CHECK(n0_threshold(0.1, 0.05, GammaKind::sqrt_exp()) == 80);
  CHECK(n0_threshold(1.0, 0.5, GammaKind::poly(2)) == 5);

  // Direct scan oracle.
  for (const auto kind : {GammaKind::sqrt_exp(), GammaKind::poly(1), GammaKind::poly(2)}) {
    for (double eps1 : {0.01, 0.05, 0.09}) {
      std::uint64_t scan = 1;
      while (!((0.1 - eps1) * std::exp2(0.5 * kind.log2_gamma(scan)) > 1.1)) ++scan;
      CHECK(n0_threshold(0.1, eps1, kind) == scan);
    }
  }
  std::uint64_t prev = 0;
  for (double eps1 : {0.05, 0.09, 0.099, 0.0999}) {
    const auto n0 = n0_threshold(0.1, eps1, GammaKind::sqrt_exp());
    CHECK(n0 > prev);
    prev = n0;
  }
  try {
    n0_threshold(0.1, 0.05, GammaKind::fixed(2));
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
  CHECK_THROWS_AS(n0_threshold(0.1, 0.2, GammaKind::sqrt_exp()), Error);
}
