#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "psconv/flatten.hpp"

namespace psconv {

enum class Format : std::uint8_t { Dense = 0, Coo = 1, Csr = 2, Csc = 3, CsrP = 4, CscP = 5 };

std::string_view format_name(Format f);
/// Accepts the names printed by format_name (case-insensitive, '-' or '_').
Format parse_format(std::string_view name);
bool is_periodic(Format f);

/// One matrix in exactly one storage format.
///
///   COO    data, row, col                     (all nnz long)
///   CSR    data, col, index (rows + 1)
///   CSC    data, row, index (cols + 1)
///   CSR_P  data, index (rows + 1), col for the first `period` rows only
///   CSC_P  data, index (cols + 1), row for the first `period` columns only
///
/// For CSC_P `period` counts columns; a filter bank with kernel period P
/// repeats every P*k*k columns.
struct SparseMatrix {
  Format format = Format::Dense;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t period = 0;
  std::vector<float> data;
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> col;
  std::vector<std::uint32_t> index;

  bool operator==(const SparseMatrix&) const = default;
};

/// Encodes with left-to-right, top-to-bottom traversal (column-major for the
/// CSC family). Periodic formats need `period` and throw NotPeriodic naming
/// the first row (column) whose pattern does not repeat.
SparseMatrix encode(const FlattenedWeightMatrix& m, Format format, std::uint32_t period = 0);

/// Exact inverse of encode. Throws FormatCorruption on malformed vectors.
FlattenedWeightMatrix decode(const SparseMatrix& s);

/// Number of stored values.
inline std::size_t stored_values(const SparseMatrix& s) { return s.data.size(); }

}  // namespace psconv
