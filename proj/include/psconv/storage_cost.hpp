#pragma once

#include <cstddef>
#include <optional>

#include "psconv/sparse_matrix.hpp"

namespace psconv {

struct MatrixDims {
  std::size_t rows = 0;  // H_F
  std::size_t cols = 0;  // W_F
};

/// Bits per stored element: values, row indices, column indices, index-vector
/// entries and the period field.
struct BitWidths {
  int value = 8;
  int row = 4;
  int col = 4;
  int index = 7;
  int period = 6;

  void validate() const;
  /// Smallest widths able to address a rows x cols matrix: row/col hold
  /// positions, index holds counts up to rows*cols, period holds up to rows.
  static BitWidths minimal_for(MatrixDims dims, int value_bits);
  bool operator==(const BitWidths&) const = default;
};

/// Bits needed to represent every integer in [0, max_value]; at least 1.
int bits_for(std::size_t max_value);

/// Closed-form storage for a matrix of density rho:
///   dense  H W b_v
///   COO    rho H W (b_v + b_r + b_c)
///   CSR    rho H W (b_v + b_c) + (H + 1) b_i
///   CSC    rho H W (b_v + b_r) + (W + 1) b_i
///   CSR_P  rho H W b_v + rho P W b_c + (H + 1) b_i + b_P
///   CSC_P  rho H W b_v + rho P H b_r + (W + 1) b_i + b_P
/// Periodic formats throw InvalidArgument when `period` is missing.
double storage_bits(MatrixDims dims, double rho, Format format, const BitWidths& widths,
                    std::optional<std::size_t> period = std::nullopt);

/// Bits of a concrete encoding, counted from its actual vector lengths.
double storage_bits(const SparseMatrix& s, const BitWidths& widths);

/// Storage minus the data payload rho H W b_v. Zero for the dense format.
double aux_overhead_bits(MatrixDims dims, double rho, Format format, const BitWidths& widths,
                         std::optional<std::size_t> period = std::nullopt);

/// 1 - overhead(candidate) / overhead(reference).
double overhead_reduction(double reference_overhead_bits, double candidate_overhead_bits);

struct Crossover {
  double density = 1.0;
  /// False when the format never beats dense inside [0, 1]; density is then
  /// the root clamped to [0, 1].
  bool crossed = false;
};

/// Density at which `format` costs exactly as much as dense storage, solved in
/// closed form (every format is affine in rho).
Crossover crossover_density(MatrixDims dims, Format format, const BitWidths& widths,
                            std::optional<std::size_t> period = std::nullopt);

/// Run-length coding cost estimate: each non-zero carries a run field of
/// `run_bits`; zero runs longer than 2^run_bits - 1 cost an extra padding
/// entry. The analytic form ignores overflow.
double rlc_bits(MatrixDims dims, double rho, int value_bits, int run_bits = 5);
double rlc_bits(const FlattenedWeightMatrix& m, int value_bits, int run_bits = 5);

}  // namespace psconv
