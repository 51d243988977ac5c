#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "psconv/tensor.hpp"

namespace psconv {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Support set of one k x k kernel: the cells allowed to be non-zero.
/// Cells are kept sorted row-major and unique.
class KernelPattern {
 public:
  KernelPattern() = default;
  KernelPattern(int k, std::vector<Cell> support);

  static KernelPattern full(int k);

  int k() const { return k_; }
  const std::vector<Cell>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  bool is_fc() const { return static_cast<int>(support_.size()) == k_ * k_; }
  bool contains(int row, int col) const;

  bool operator==(const KernelPattern&) const = default;

 private:
  int k_ = 0;
  std::vector<Cell> support_;
};

/// One period of kernel patterns. Filter f, channel c uses
/// variants[(c + f) mod period]; FC patterns come first in the period.
struct PatternSchedule {
  int k = 3;
  int kss = 1;
  int kvs = 1;
  int period = 1;
  int eta = 0;
  std::uint64_t seed = 0;
  std::vector<KernelPattern> variants;

  /// Throws InvalidArgument describing the first broken invariant.
  void validate() const;
  /// True when the union of supports over one period is all k*k cells.
  bool covers_all_cells() const;
  /// Sum of support sizes over one period (W_P for eta = 1).
  int weights_per_period() const;

  bool operator==(const PatternSchedule&) const = default;
};

/// Draws `kvs` kernel supports of `kss` cells each. Cells come from a pool of
/// not-yet-chosen positions (index order, draw by pool index); the pool
/// refills with every cell not already in the current variant once it runs
/// dry. Throws CoverageInfeasible when kvs * kss < k * k.
std::vector<KernelPattern> generate_variants(int k, int kss, int kvs, std::uint64_t seed);

/// Assembles a period of `period` patterns: `eta` FC kernels at the front,
/// then the sparse variants. Surplus variants are dropped and missing slots
/// refilled by seeded uniform choice, continuing the generator stream used for
/// the variants. With eta == 1 full coverage is not required of the variants.
PatternSchedule build_schedule(int k, int kss, int kvs, int period, int eta, std::uint64_t seed);

/// Boolean keep-mask over a (C_o, C_i, k, k) filter bank.
class LayerMask {
 public:
  LayerMask(std::size_t filters, std::size_t channels, int k);

  Shape4 shape() const { return Shape4{filters_, channels_, k_, k_}; }
  std::size_t filters() const { return filters_; }
  std::size_t channels() const { return channels_; }
  int k() const { return static_cast<int>(k_); }

  bool at(std::size_t f, std::size_t c, std::size_t i, std::size_t j) const {
    return bits_[index(f, c, i, j)] != 0;
  }
  void set(std::size_t f, std::size_t c, std::size_t i, std::size_t j, bool v) {
    bits_[index(f, c, i, j)] = v ? 1 : 0;
  }

  std::size_t filter_nnz(std::size_t f) const;
  std::size_t popcount() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

 private:
  std::size_t index(std::size_t f, std::size_t c, std::size_t i, std::size_t j) const {
    return ((f * channels_ + c) * k_ + i) * k_ + j;
  }

  std::size_t filters_;
  std::size_t channels_;
  std::size_t k_;
  std::vector<std::uint8_t> bits_;
};

/// Expands a schedule over a layer with rotation by filter index. When the
/// period does not divide C_i the last period is truncated and a balance
/// warning is appended to `warnings` (if given).
LayerMask expand_mask(const PatternSchedule& schedule, std::size_t in_channels,
                      std::size_t out_channels, std::vector<std::string>* warnings = nullptr);

/// Copy of `weights` with every masked-out position set to exactly 0.
Tensor4D apply_mask(const Tensor4D& weights, const LayerMask& mask);

}  // namespace psconv
