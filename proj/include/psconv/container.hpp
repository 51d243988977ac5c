#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psconv/sparse_matrix.hpp"
#include "psconv/storage_cost.hpp"

namespace psconv {

/// PSCV container layout (all integers little-endian):
///
///   "PSCV"  u16 version  u8 format
///   u32 rows  u32 cols  u32 period
///   u8 b_v  u8 b_r  u8 b_c  u8 b_i  u8 b_P
///   u32 |data|  u32 |row|  u32 |col|  u32 |index|
///   data    IEEE-754 binary32 per value
///   row     |row| entries of b_r bits, LSB first, padded to a byte
///   col     likewise with b_c bits
///   index   likewise with b_i bits
///
/// b_v is recorded for cost accounting; values are stored unquantized.
inline constexpr std::uint16_t kContainerVersion = 1;

struct StoredMatrix {
  SparseMatrix matrix;
  BitWidths widths;
};

/// Throws InvalidArgument if an auxiliary entry does not fit its width.
std::vector<std::uint8_t> write_container(const SparseMatrix& s, const BitWidths& widths);
StoredMatrix read_container(const std::vector<std::uint8_t>& bytes);

/// Widths just large enough for the auxiliary vectors of `s`.
BitWidths fitted_widths(const SparseMatrix& s, int value_bits);

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Human-readable dump of every vector, and its inverse.
std::string container_json(const StoredMatrix& stored);
StoredMatrix container_from_json(const std::string& text);

}  // namespace psconv
