#pragma once

#include <span>
#include <type_traits>

#include "psconv/tensor.hpp"

namespace psconv {

/// Accumulator type: at least twice the precision of the stored element.
template <typename T>
using accumulator_t = std::conditional_t<(sizeof(T) < sizeof(double)), double, long double>;

/// Output extents of a stride-1 convolution. Throws ShapeError when the
/// kernel does not fit the padded input.
Shape4 conv_output_shape(const Shape4& input, const Shape4& weights, const ConvConfig& cfg);

/// Zero-pads every channel of `input` by `pad` on each spatial edge.
template <typename T>
Tensor4<T> zero_pad(const Tensor4<T>& input, int pad);

/// Reference convolution:
///   O[z][v][x][y] = relu(B[v] + sum_{c,i,j} I[z][c][x+i][y+j] * W[v][c][i][j])
/// evaluated on the zero-padded input. Per output element the sum runs over
/// (c, i, j) in lexicographic order, so results are reproducible bit for bit.
/// `bias` may be empty unless cfg.apply_bias is set.
template <typename T>
Tensor4<T> dense_conv(const Tensor4<T>& input, const Tensor4<T>& weights,
                      std::span<const T> bias, const ConvConfig& cfg);

}  // namespace psconv
