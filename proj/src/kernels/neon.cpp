#include <arm_neon.h>

#include "expu/kernels.hpp"

namespace expu::kernels::detail {

void row_products_neon(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out) {
  const std::int32_t* base = cols.data.data();
  // NEON has no gather; lanes are filled with scalar loads.
  for (std::size_t k = 0; k < cols.ld; k += 4) {
    float64x2_t acc0 = vdupq_n_f64(1.0);
    float64x2_t acc1 = vdupq_n_f64(1.0);
    for (std::size_t i = 0; i < cols.n; ++i) {
      const double* row = table.data + static_cast<std::size_t>(ref[i]) * table.stride;
      const std::int32_t* col = base + i * cols.ld + k;
      const double lo[2] = {row[col[0]], row[col[1]]};
      const double hi[2] = {row[col[2]], row[col[3]]};
      acc0 = vmulq_f64(acc0, vld1q_f64(lo));
      acc1 = vmulq_f64(acc1, vld1q_f64(hi));
    }
    vst1q_f64(out + k, acc0);
    vst1q_f64(out + k + 2, acc1);
  }
}

}  // namespace expu::kernels::detail
