#include "expu/kernels.hpp"

namespace expu::kernels::detail {

void row_products_scalar(TableView table, const std::int32_t* ref, const ColumnLayout& cols, double* out) {
  for (std::size_t k = 0; k < cols.ld; ++k) out[k] = 1.0;
  for (std::size_t i = 0; i < cols.n; ++i) {
    const double* row = table.data + static_cast<std::size_t>(ref[i]) * table.stride;
    const std::int32_t* col = cols.data.data() + i * cols.ld;
    for (std::size_t k = 0; k < cols.ld; ++k) out[k] *= row[col[k]];
  }
}

}  // namespace expu::kernels::detail
