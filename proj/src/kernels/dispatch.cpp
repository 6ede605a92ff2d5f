#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "expu/error.hpp"
#include "expu/kernels.hpp"

namespace expu::kernels {

ColumnLayout::ColumnLayout(std::span<const Symbol> rows, std::size_t count_, std::size_t n_)
    : n(n_), count(count_), ld((count_ + kLanePad - 1) / kLanePad * kLanePad), data(n_ * ld, 0) {
  if (rows.size() != count * n) throw Error(ErrorCode::LengthMismatch, "codebook shape");
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t i = 0; i < n; ++i) data[i * ld + k] = static_cast<std::int32_t>(rows[k * n + i]);
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

namespace {

std::vector<Backend> detect() {
  std::vector<Backend> out{Backend::Scalar};
#if defined(EXPU_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) out.push_back(Backend::Avx2);
#endif
#if defined(EXPU_HAVE_NEON)
  out.push_back(Backend::Neon);
#endif
  return out;
}

Backend choose() {
  const auto& avail = available_backends();
  if (const char* env = std::getenv("EXPU_KERNEL")) {
    for (Backend b : avail) {
      if (to_string(b) == env) return b;
    }
    throw Error(ErrorCode::InvalidConfig, std::string("EXPU_KERNEL=") + env + " is not available on this machine");
  }
  return avail.back();
}

}  // namespace

std::span<const Backend> available_backends() {
  static const std::vector<Backend> backends = detect();
  return backends;
}

Backend active_backend() {
  static const Backend backend = choose();
  return backend;
}

void row_products(Backend backend, TableView table, std::span<const std::int32_t> ref, const ColumnLayout& cols,
                  std::span<double> out) {
  if (ref.size() != cols.n) throw Error(ErrorCode::LengthMismatch, "reference length differs from codeword length");
  if (out.size() < cols.ld) throw Error(ErrorCode::LengthMismatch, "output buffer shorter than padded codebook");
  const auto avail = available_backends();
  if (std::find(avail.begin(), avail.end(), backend) == avail.end()) {
    throw Error(ErrorCode::InvalidConfig, "kernel backend not supported here: " + std::string(to_string(backend)));
  }
  switch (backend) {
    case Backend::Scalar:
      detail::row_products_scalar(table, ref.data(), cols, out.data());
      return;
    case Backend::Avx2:
#if defined(EXPU_HAVE_AVX2)
      detail::row_products_avx2(table, ref.data(), cols, out.data());
      return;
#else
      break;
#endif
    case Backend::Neon:
#if defined(EXPU_HAVE_NEON)
      detail::row_products_neon(table, ref.data(), cols, out.data());
      return;
#else
      break;
#endif
  }
  throw Error(ErrorCode::InvalidConfig, std::string("kernel backend not compiled in: ") + std::string(to_string(backend)));
}

void row_products(TableView table, std::span<const std::int32_t> ref, const ColumnLayout& cols,
                  std::span<double> out) {
  row_products(active_backend(), table, ref, cols, out);
}

}  // namespace expu::kernels
