// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "expu/kernels.hpp"

namespace expu::kernels::detail {

void row_products_avx2(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out) {
  const std::int32_t* base = cols.data.data();
  // Eight codewords per pass, kept in two registers across all positions.
  for (std::size_t k = 0; k < cols.ld; k += 8) {
    __m256d acc0 = _mm256_set1_pd(1.0);
    __m256d acc1 = _mm256_set1_pd(1.0);
    for (std::size_t i = 0; i < cols.n; ++i) {
      const double* row = table.data + static_cast<std::size_t>(ref[i]) * table.stride;
      const std::int32_t* col = base + i * cols.ld + k;
      const __m128i idx0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col));
      const __m128i idx1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + 4));
      acc0 = _mm256_mul_pd(acc0, _mm256_i32gather_pd(row, idx0, 8));
      acc1 = _mm256_mul_pd(acc1, _mm256_i32gather_pd(row, idx1, 8));
    }
    _mm256_storeu_pd(out + k, acc0);
    _mm256_storeu_pd(out + k + 4, acc1);
  }
}

}  // namespace expu::kernels::detail
