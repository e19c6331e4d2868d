#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace faao {

template <class Op>
void apply_along_axis(std::span<const double> x, std::span<double> y, std::size_t outer, std::size_t len,
                      std::size_t inner, const Op& op) {
  if (x.size() != outer * len * inner || y.size() != x.size()) throw std::invalid_argument("apply_along_axis: size mismatch");
  const long lines = static_cast<long>(outer * inner);
  if (inner == 1) {
#pragma omp parallel for schedule(static) if (lines > 1 && len >= 64)
    for (long l = 0; l < lines; ++l) {
      const std::size_t base = static_cast<std::size_t>(l) * len;
      op(x.subspan(base, len), y.subspan(base, len));
    }
    return;
  }
#pragma omp parallel if (lines > 1 && len * lines >= 4096)
  {
    std::vector<double> in(len), out(len);
#pragma omp for schedule(static)
    for (long l = 0; l < lines; ++l) {
      const std::size_t o = static_cast<std::size_t>(l) / inner;
      const std::size_t j = static_cast<std::size_t>(l) % inner;
      const std::size_t base = o * len * inner + j;
      for (std::size_t p = 0; p < len; ++p) in[p] = x[base + p * inner];
      op(std::span<const double>(in), std::span<double>(out));
      for (std::size_t p = 0; p < len; ++p) y[base + p * inner] = out[p];
    }
  }
}

}  // namespace faao
