#include "psconv/flatten.hpp"

#include <algorithm>
#include <string>

namespace psconv {

FlattenedWeightMatrix::FlattenedWeightMatrix(std::size_t r, std::size_t c, std::vector<float> v, int k)
    : rows(r), cols(c), kernel_size(k), values(std::move(v)) {
  if (values.size() != rows * cols) {
    throw ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                     std::to_string(values.size()) + " values");
  }
}

std::size_t FlattenedWeightMatrix::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](float v) { return v != 0.0f; }));
}

bool FlattenedWeightMatrix::same_row_pattern(std::size_t a, std::size_t b) const {
  for (std::size_t c = 0; c < cols; ++c)
    if (nonzero(a, c) != nonzero(b, c)) return false;
  return true;
}

bool FlattenedWeightMatrix::same_col_pattern(std::size_t a, std::size_t b) const {
  for (std::size_t r = 0; r < rows; ++r)
    if (nonzero(r, a) != nonzero(r, b)) return false;
  return true;
}

FlattenedWeightMatrix flatten(const Tensor4D& weights) {
  const auto& s = weights.shape();
  if (s.h != s.w) throw ShapeError("kernels must be square, got " + s.str());
  // The tensor is already filter-major with row-major kernels.
  return FlattenedWeightMatrix(s.n, s.c * s.h * s.w, weights.values(), static_cast<int>(s.h));
}

FlattenedWeightMatrix flatten(const LayerMask& mask) {
  std::vector<float> v(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), v.begin(),
                 [](std::uint8_t b) { return b != 0 ? 1.0f : 0.0f; });
  const auto k = static_cast<std::size_t>(mask.k());
  return FlattenedWeightMatrix(mask.filters(), mask.channels() * k * k, std::move(v), mask.k());
}

Tensor4D unflatten(const FlattenedWeightMatrix& m, int k) {
  const auto kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  if (k < 1 || m.cols % kk != 0) {
    throw ShapeError("cannot split " + std::to_string(m.cols) + " columns into " + std::to_string(k) +
                     "x" + std::to_string(k) + " kernels");
  }
  return Tensor4D(Shape4{m.rows, m.cols / kk, static_cast<std::size_t>(k), static_cast<std::size_t>(k)},
                  m.values);
}

}  // namespace psconv
