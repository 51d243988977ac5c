#pragma once

#include <cstddef>
#include <vector>

#include "psconv/patterns.hpp"
#include "psconv/tensor.hpp"

namespace psconv {

/// C_o x (k*k*C_i) matrix: row f is filter f, channel blocks of k*k entries
/// read row-major within each kernel. `kernel_size` is 0 when the matrix did
/// not come from a filter bank.
struct FlattenedWeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int kernel_size = 0;
  std::vector<float> values;

  FlattenedWeightMatrix() = default;
  FlattenedWeightMatrix(std::size_t r, std::size_t c, std::vector<float> v, int k = 0);

  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  float& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  bool nonzero(std::size_t r, std::size_t c) const { return at(r, c) != 0.0f; }
  std::size_t nnz() const;
  double density() const { return static_cast<double>(nnz()) / static_cast<double>(rows * cols); }
  /// True when rows a and b have non-zeros in the same columns.
  bool same_row_pattern(std::size_t a, std::size_t b) const;
  bool same_col_pattern(std::size_t a, std::size_t b) const;

  bool operator==(const FlattenedWeightMatrix&) const = default;
};

FlattenedWeightMatrix flatten(const Tensor4D& weights);

/// Pattern matrix of a mask: 1.0 where the weight may be non-zero.
FlattenedWeightMatrix flatten(const LayerMask& mask);

/// Inverse of flatten(weights) for a known kernel side.
Tensor4D unflatten(const FlattenedWeightMatrix& m, int k);

}  // namespace psconv
