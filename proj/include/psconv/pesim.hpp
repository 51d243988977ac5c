#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psconv/sparse_matrix.hpp"
#include "psconv/storage_cost.hpp"

namespace psconv {

/// Slice of a flattened weight matrix handed to one processing element: a run
/// of filters, a run of kernels (input channels) and one row of each kernel.
struct SubMatrixJob {
  FlattenedWeightMatrix source;
  std::size_t first_filter = 0;
  std::size_t filter_count = 0;
  std::size_t first_kernel = 0;
  std::size_t kernel_count = 0;
  int kernel_row = 0;

  MatrixDims dims() const;
};

/// For each chosen kernel c, takes columns c*k*k + kernel_row*k + [0, k).
/// 16 filters x 4 kernels with k = 3 gives a 16x12 matrix.
FlattenedWeightMatrix extract_submatrix(const SubMatrixJob& job);

/// Smallest P >= 1 such that every row has the sparsity pattern of row r mod P.
/// Returns the row count when no shorter period exists.
std::size_t detect_row_period(const FlattenedWeightMatrix& m);
/// Column analogue, used for CSC_P.
std::size_t detect_col_period(const FlattenedWeightMatrix& m);

enum class ScratchpadStrategy { ReplicateOnWrite, CircularBuffer };

std::string_view strategy_name(ScratchpadStrategy s);
ScratchpadStrategy parse_strategy(std::string_view name);

struct PeOptions {
  ScratchpadStrategy strategy = ScratchpadStrategy::ReplicateOnWrite;
  BitWidths widths;
  /// Period for CSR_P (rows) or CSC_P (columns). Ignored by other formats.
  std::uint32_t period = 0;
  /// Store (data, position) pairs in the scratchpad instead of separate
  /// vectors. Only meaningful with replicate_on_write.
  bool bundle_pairs = false;
  /// DRAM bits of the reference encoding; nullopt uses CSR of the same matrix.
  std::optional<double> baseline_dram_bits;
};

/// One weight delivered to the multiply stage.
struct StreamEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  float value = 0.0f;

  bool operator==(const StreamEntry&) const = default;
};

struct TraceEvent {
  std::string op;      // dram_read, spad_write, spad_read
  std::string vector;  // data, row, col, index, period, pairs
  std::uint64_t entries = 0;
  std::uint64_t bits = 0;
};

struct TrafficReport {
  Format format = Format::Csr;
  ScratchpadStrategy strategy = ScratchpadStrategy::ReplicateOnWrite;
  std::uint32_t period = 0;
  bool bundle_pairs = false;
  double dram_bits = 0.0;
  double baseline_dram_bits = 0.0;
  /// dram_bits / baseline_dram_bits; energy is taken as proportional to DRAM bits.
  double relative_energy = 1.0;
  std::uint64_t onchip_bits_written = 0;
  std::uint64_t scratchpad_entries = 0;
  /// Position-vector entries (col for CSR family, row for CSC family) written
  /// into the scratchpad.
  std::uint64_t position_writes = 0;
  /// Times each stored position entry is read; rows/P for the circular buffer.
  double read_amplification = 1.0;
  std::vector<StreamEntry> stream;
  std::vector<TraceEvent> trace;
};

/// Streams `m` from DRAM through one PE scratchpad in the given format.
/// Throws InvalidArgument for circular_buffer on a non-periodic format or for
/// bundled pairs with the circular buffer, and NotPeriodic when the detected
/// period does not divide the configured one.
TrafficReport simulate_pe(const FlattenedWeightMatrix& m, Format format, const PeOptions& opts);

std::string traffic_json(const TrafficReport& r);
/// op,vector,entries,bits
std::string traffic_trace_csv(const TrafficReport& r);

}  // namespace psconv

namespace psconv {

/// The 16 x 12 PE slice of the period-4 example: a 16-filter, 4-channel layer
/// with four kss-cell variants (eta = 0), unit-range non-zero weights drawn
/// from `seed`, kernel row `kernel_row` of every kernel.
FlattenedWeightMatrix example_pe_submatrix(std::uint64_t seed, int kss = 4, int kernel_row = 0);

}  // namespace psconv
