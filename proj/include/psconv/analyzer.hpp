#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psconv/network.hpp"
#include "psconv/storage_cost.hpp"

namespace psconv {

enum class LayerKind { ConvSfcc, ConvSparse, ConvPsd, DwcPwc, GwcPwc, Pointwise };

std::string_view layer_kind_name(LayerKind kind);

/// Shape and sparsity of one layer for closed-form counting. One FLOP is one
/// multiply-accumulate.
struct LayerSpec {
  LayerKind kind = LayerKind::ConvSfcc;
  int k = 3;
  std::uint64_t in_channels = 1;
  std::uint64_t out_channels = 1;
  std::uint64_t out_height = 1;
  std::uint64_t out_width = 1;
  int groups = 0;  // G, GWC only
  int kss = 0;     // n
  int period = 0;  // P, PSD only
  int eta = 1;

  void validate() const;
};

/// Weights of one layer (k*k*C_i*C_o for SFCC).
std::uint64_t params_layer(const LayerSpec& spec);

///   sfcc       k^2 H_o W_o C_o C_i
///   sparse     H_o W_o C_i C_o n
///   psd        [(C_i/P) k^2 + (C_i - C_i/P) n] H_o W_o C_o
///   dwc_pwc    H_o W_o C_i (k^2 + C_o)
///   gwc_pwc    H_o W_o C_o C_i (k^2/G + 1)
///   pointwise  H_o W_o C_o C_i
/// For psd the FC kernel count is taken from the rotated layout, which equals
/// the closed form whenever P divides C_i.
std::uint64_t flops_layer(const LayerSpec& spec);

/// FC kernels in a rotated layer with `eta` FC kernels leading each period.
std::uint64_t fc_kernel_count(std::uint64_t in_channels, std::uint64_t out_channels, int period, int eta);

/// Non-zero weights in one period: (P - eta) n + eta k^2.
int weights_per_period(int k, int n, int period, int eta = 1);

/// FLOPs(DWC+PWC) / FLOPs(periodic sparse, one FC per period).
double flop_ratio_mobilenet(int k, int n, int period, std::uint64_t out_channels);
/// FLOPs(GWC+PWC) / FLOPs(periodic sparse, one FC per period).
double flop_ratio_shufflenet(int k, int n, int period, int groups);
/// Wide-layer, long-period limits: 1/n and (k^2/G + 1)/n.
double flop_ratio_mobilenet_limit(int n);
double flop_ratio_shufflenet_limit(int k, int n, int groups);

/// Sparsity applied to every eligible layer (k > 1, not the first layer).
/// period == 0 means no periodic structure; eta must then be 0.
struct SparsityConfig {
  int kss = 9;
  int period = 0;
  int eta = 0;

  void validate(int k) const;
  /// Layer-level closed-form reduction: 1 - W_P/(P k^2), or 1 - n/k^2.
  double closed_form_reduction(int k) const;
  std::string label() const;
};

struct StorageOptions {
  Format format = Format::CsrP;
  /// Size of the weight sub-matrix each PE stores. nullopt stores every layer
  /// as one whole flattened matrix.
  std::optional<MatrixDims> tile = MatrixDims{32, 12};
  /// nullopt sizes row/col/index widths minimally for the tile (or layer).
  std::optional<BitWidths> widths;
  int value_bits = 8;
  int period_bits = 6;
};

struct LayerCost {
  std::string name;
  int k = 3;
  std::uint64_t in_channels = 0;
  std::uint64_t out_channels = 0;
  std::uint64_t out_height = 0;
  std::uint64_t out_width = 0;
  bool sparse = false;
  std::uint64_t dense_params = 0;
  std::uint64_t sparse_params = 0;
  std::uint64_t dense_flops = 0;
  std::uint64_t sparse_flops = 0;
  double density = 1.0;
  double storage_bits = 0.0;
  double dense_bits = 0.0;
};

struct CostReport {
  std::string network;
  double alpha = 1.0;
  SparsityConfig sparsity;
  std::vector<int> stage_widths;
  std::vector<LayerCost> layers;
  std::uint64_t dense_params = 0;
  std::uint64_t sparse_params = 0;
  std::uint64_t dense_flops = 0;
  std::uint64_t sparse_flops = 0;
  std::uint64_t head_params = 0;
  /// From the absolute conv totals (first layer and shortcuts stay dense).
  double reduction_pct = 0.0;
  /// Layer-level closed form for 3x3 layers, independent of architecture.
  double closed_form_reduction_pct = 0.0;
  double flop_reduction_pct = 0.0;

  std::optional<StorageOptions> storage;
  BitWidths widths_used;
  double storage_bits = 0.0;
  double dense_bits = 0.0;
  double normalized_storage = 1.0;
};

/// Conv-layer parameter and FLOP counts, dense vs sparse. Biases, batch-norm
/// and the classifier head are excluded from the totals (the head is reported
/// separately).
CostReport param_count(const NetworkSpec& net, const SparsityConfig& sparsity);

/// param_count plus storage in `opts.format`; sparse layers are priced with
/// the closed-form cost of their density, dense layers in the dense format.
/// normalized_storage is total bits over all-dense bits.
CostReport network_storage(const NetworkSpec& net, const SparsityConfig& sparsity, const StorageOptions& opts);

/// Rounds a percentage to `decimals` places (half away from zero).
double round_to(double value, int decimals);

}  // namespace psconv
