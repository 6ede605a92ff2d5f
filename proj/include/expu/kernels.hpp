#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "expu/channel.hpp"

namespace expu::kernels {

// Both hot loops in the library have the same shape: for every codeword k,
// multiply one table entry per position,
//
//     out[k] = prod_i table[ref[i] * stride + column(i)[k]],
//
// with table = Bhattacharyya matrix and ref = a codeword for the union bound,
// or table = W transposed and ref = an output sequence for ML likelihoods.
// Every backend performs the multiplications in the same order (i ascending,
// starting from 1.0), so all backends return bit-identical results.

/// Codebook stored position-major: symbol of codeword k at position i is
/// data[i * ld + k]. ld is padded to a multiple of kLanePad with symbol 0.
struct ColumnLayout {
  static constexpr std::size_t kLanePad = 8;
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t ld = 0;
  std::vector<std::int32_t> data;

  ColumnLayout(std::span<const Symbol> rows, std::size_t count, std::size_t n);
};

struct TableView {
  const double* data;
  std::size_t stride;
};

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b);

/// Backends compiled in and supported by the running CPU; Scalar is always first.
std::span<const Backend> available_backends();

/// Backend used by row_products() without an explicit backend: the widest
/// available one, unless EXPU_KERNEL=scalar|avx2|neon selects another.
Backend active_backend();

/// out must hold at least cols.ld values; entries past cols.count are scratch.
void row_products(Backend backend, TableView table, std::span<const std::int32_t> ref,
                  const ColumnLayout& cols, std::span<double> out);
void row_products(TableView table, std::span<const std::int32_t> ref, const ColumnLayout& cols,
                  std::span<double> out);

namespace detail {
void row_products_scalar(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out);
#if defined(EXPU_HAVE_AVX2)
void row_products_avx2(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out);
#endif
#if defined(EXPU_HAVE_NEON)
void row_products_neon(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out);
#endif
}  // namespace detail

}  // namespace expu::kernels
