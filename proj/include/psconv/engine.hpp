#pragma once

#include <cstdint>
#include <vector>

#include "psconv/dense_conv.hpp"
#include "psconv/sparse_matrix.hpp"

namespace psconv {

/// Convolution layer whose weights live in a CSR or CSR_P encoded flattened
/// matrix of shape (C_o, k*k*C_i).
class SparseConvLayer {
 public:
  SparseConvLayer(SparseMatrix weights, std::vector<float> bias, ConvConfig cfg, int k,
                  std::size_t in_channels, std::size_t out_channels);

  const SparseMatrix& weights() const { return weights_; }
  const std::vector<float>& bias() const { return bias_; }
  const ConvConfig& config() const { return cfg_; }
  int k() const { return k_; }
  std::size_t in_channels() const { return in_channels_; }
  std::size_t out_channels() const { return out_channels_; }

  /// Stored non-zeros of filter f.
  std::size_t row_nnz(std::size_t f) const { return weights_.index[f + 1] - weights_.index[f]; }
  std::size_t nnz() const { return weights_.data.size(); }

 private:
  SparseMatrix weights_;
  std::vector<float> bias_;
  ConvConfig cfg_;
  int k_;
  std::size_t in_channels_;
  std::size_t out_channels_;
};

struct MultiplyCounter {
  std::uint64_t multiplies = 0;
};

/// Executes the layer touching only stored weights. Each output element
/// accumulates its filter's stored terms in column order, which is the
/// dense_conv order with the structural zeros removed. `threads` splits work
/// over output channels and never changes the result.
template <typename T>
Tensor4<T> sparse_conv(const SparseConvLayer& layer, const Tensor4<T>& input,
                       MultiplyCounter* counter = nullptr, unsigned threads = 1);

/// Multiplies performed by sparse_conv on an input of the given shape:
/// N * H_o * W_o * (stored non-zeros).
std::uint64_t count_multiplies(const SparseConvLayer& layer, const Shape4& input_shape);

}  // namespace psconv
