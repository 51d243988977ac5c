#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psconv/error.hpp"

namespace psconv {

/// LSB-first bit packer appending to a byte buffer.
class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void write(std::uint64_t value, int bits) {
    for (int i = 0; i < bits; ++i) {
      if (used_ == 0) out_.push_back(0);
      out_.back() |= static_cast<std::uint8_t>(((value >> i) & 1u) << used_);
      used_ = (used_ + 1) % 8;
    }
  }

  /// Pads the current byte with zeros.
  void align() { used_ = 0; }

 private:
  std::vector<std::uint8_t>& out_;
  int used_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint64_t read(int bits) {
    std::uint64_t v = 0;
    for (int i = 0; i < bits; ++i) {
      const std::size_t byte = cursor_ / 8;
      if (byte >= size_) throw FormatCorruption("bit stream truncated");
      v |= static_cast<std::uint64_t>((data_[byte] >> (cursor_ % 8)) & 1u) << i;
      ++cursor_;
    }
    return v;
  }

  void align() { cursor_ = (cursor_ + 7) / 8 * 8; }
  std::size_t byte_position() const { return (cursor_ + 7) / 8; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t cursor_ = 0;
};

}  // namespace psconv
