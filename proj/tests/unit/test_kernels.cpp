#include <doctest.h>

#include <cstring>
#include <random>

#include "expu/kernels.hpp"

using namespace expu;
using namespace expu::kernels;

namespace {

std::vector<double> run(Backend b, const std::vector<double>& table, std::size_t stride,
                        const std::vector<std::int32_t>& ref, const ColumnLayout& cols) {
  std::vector<double> out(cols.ld);
  row_products(b, {table.data(), stride}, ref, cols, out);
  out.resize(cols.count);
  return out;
}

}  // namespace

TEST_CASE("scalar is always available and listed first") {
  const auto avail = available_backends();
  REQUIRE_FALSE(avail.empty());
  CHECK(avail.front() == Backend::Scalar);
  MESSAGE("active backend: " << to_string(active_backend()));
}

TEST_CASE("column layout pads to the lane width") {
  const std::vector<Symbol> rows{0, 1, 2, 1, 0, 2, 2, 2, 1};  // 3 codewords of length 3
  const ColumnLayout cols(rows, 3, 3);
  CHECK(cols.ld == ColumnLayout::kLanePad);
  CHECK(cols.data[0 * cols.ld + 1] == 1);  // codeword 1, position 0
  CHECK(cols.data[2 * cols.ld + 2] == 1);  // codeword 2, position 2
  CHECK(cols.data[1 * cols.ld + 5] == 0);  // padding
}

TEST_CASE("scalar kernel computes the products it documents") {
  const std::vector<double> table{1.0, 0.5, 0.5, 1.0};
  const std::vector<Symbol> rows{0, 0, 0, 1, 1, 1};
  const ColumnLayout cols(rows, 3, 2);
  const auto out = run(Backend::Scalar, table, 2, {0, 0}, cols);
  CHECK(out == std::vector<double>{1.0, 0.5, 0.25});
}

TEST_CASE("every backend is bit-identical to scalar") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows_in_table = 2 + static_cast<std::size_t>(t % 5);
    const std::size_t alphabet = 2 + static_cast<std::size_t>((t / 5) % 4);
    const std::size_t n = 1 + static_cast<std::size_t>(t % 37);
    const std::size_t count = 1 + static_cast<std::size_t>((t * 7) % 45);
    std::vector<double> table(rows_in_table * alphabet);
    for (auto& v : table) v = u(rng) < 0.1 ? 0.0 : u(rng);
    std::vector<Symbol> symbols(count * n);
    for (auto& s : symbols) s = static_cast<Symbol>(rng() % alphabet);
    std::vector<std::int32_t> ref(n);
    for (auto& r : ref) r = static_cast<std::int32_t>(rng() % rows_in_table);
    const ColumnLayout cols(symbols, count, n);

    const auto expected = run(Backend::Scalar, table, alphabet, ref, cols);
    for (Backend b : available_backends()) {
      const auto got = run(b, table, alphabet, ref, cols);
      CHECK(std::memcmp(got.data(), expected.data(), count * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("shape errors") {
  const std::vector<double> table{1.0, 0.5, 0.5, 1.0};
  const std::vector<Symbol> rows{0, 0, 1, 1};
  const ColumnLayout cols(rows, 2, 2);
  std::vector<double> out(cols.ld);
  const std::vector<std::int32_t> short_ref{0};
  CHECK_THROWS(row_products(Backend::Scalar, {table.data(), 2}, short_ref, cols, out));
  std::vector<double> tiny(1);
  const std::vector<std::int32_t> ref{0, 1};
  CHECK_THROWS(row_products(Backend::Scalar, {table.data(), 2}, ref, cols, tiny));
  CHECK_THROWS(ColumnLayout(rows, 3, 2));
}
