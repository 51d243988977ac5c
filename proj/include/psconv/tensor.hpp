#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psconv/error.hpp"

namespace psconv {

/// Extents of a 4D tensor. For activations the leading extent is the batch N,
/// for filter banks it is the number of filters C_o.
struct Shape4 {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t size() const { return n * c * h * w; }
  bool operator==(const Shape4&) const = default;
  std::string str() const;
};

/// Dense row-major 4D tensor, last index fastest.
template <typename T>
class Tensor4 {
 public:
  using value_type = T;

  Tensor4() = default;

  explicit Tensor4(Shape4 shape) : shape_(shape), data_(checked_size(shape)) {}

  Tensor4(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != checked_size(shape)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match extents " + shape.str());
    }
  }

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }

  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[offset(n, c, h, w)];
  }
  const T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[offset(n, c, h, w)];
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Tensor4&) const = default;

 private:
  static std::size_t checked_size(const Shape4& shape) {
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0) {
      throw InvalidArgument("zero extent in tensor shape " + shape.str());
    }
    return shape.size();
  }

  Shape4 shape_;
  std::vector<T> data_;
};

using Tensor4D = Tensor4<float>;

struct ConvConfig {
  int stride = 1;
  int padding = 0;
  bool apply_relu = false;
  bool apply_bias = false;

  /// "same" padding for an odd kernel side.
  static ConvConfig same(int k, bool relu = false, bool bias = false) {
    return ConvConfig{1, (k - 1) / 2, relu, bias};
  }
};

inline std::string Shape4::str() const {
  return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
         std::to_string(w) + ")";
}

}  // namespace psconv
