#include "psconv/dense_conv.hpp"

#include <algorithm>
#include <string>

namespace psconv {

Shape4 conv_output_shape(const Shape4& input, const Shape4& weights, const ConvConfig& cfg) {
  if (cfg.stride != 1) {
    throw InvalidArgument("only stride 1 is supported, got " + std::to_string(cfg.stride));
  }
  if (cfg.padding < 0) {
    throw InvalidArgument("negative padding " + std::to_string(cfg.padding));
  }
  if (weights.c != input.c) {
    throw ShapeError("weight channel extent " + std::to_string(weights.c) +
                     " does not match input channel extent " + std::to_string(input.c));
  }
  const std::size_t pad = static_cast<std::size_t>(cfg.padding);
  const std::size_t padded_h = input.h + 2 * pad;
  const std::size_t padded_w = input.w + 2 * pad;
  if (weights.h > padded_h || weights.w > padded_w) {
    throw ShapeError("kernel " + std::to_string(weights.h) + "x" + std::to_string(weights.w) +
                     " larger than padded input " + std::to_string(padded_h) + "x" +
                     std::to_string(padded_w));
  }
  return Shape4{input.n, weights.n, padded_h - weights.h + 1, padded_w - weights.w + 1};
}

template <typename T>
Tensor4<T> zero_pad(const Tensor4<T>& input, int pad) {
  if (pad == 0) return input;
  const auto& s = input.shape();
  const std::size_t p = static_cast<std::size_t>(pad);
  Tensor4<T> out(Shape4{s.n, s.c, s.h + 2 * p, s.w + 2 * p});
  for (std::size_t z = 0; z < s.n; ++z)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t x = 0; x < s.h; ++x) {
        auto src = input.data().subspan(input.offset(z, c, x, 0), s.w);
        std::copy(src.begin(), src.end(), out.data().begin() + out.offset(z, c, x + p, p));
      }
  return out;
}

template <typename T>
Tensor4<T> dense_conv(const Tensor4<T>& input, const Tensor4<T>& weights,
                      std::span<const T> bias, const ConvConfig& cfg) {
  using Acc = accumulator_t<T>;
  const Shape4 out_shape = conv_output_shape(input.shape(), weights.shape(), cfg);
  if (cfg.apply_bias && bias.size() != weights.shape().n) {
    throw ShapeError("bias length " + std::to_string(bias.size()) + " does not match C_o " +
                     std::to_string(weights.shape().n));
  }
  const Tensor4<T> padded = zero_pad(input, cfg.padding);
  const auto& ws = weights.shape();
  Tensor4<T> out(out_shape);

  for (std::size_t z = 0; z < out_shape.n; ++z)
    for (std::size_t v = 0; v < out_shape.c; ++v)
      for (std::size_t x = 0; x < out_shape.h; ++x)
        for (std::size_t y = 0; y < out_shape.w; ++y) {
          Acc acc = 0;
          for (std::size_t c = 0; c < ws.c; ++c)
            for (std::size_t i = 0; i < ws.h; ++i)
              for (std::size_t j = 0; j < ws.w; ++j)
                acc += static_cast<Acc>(padded.at(z, c, x + i, y + j)) *
                       static_cast<Acc>(weights.at(v, c, i, j));
          if (cfg.apply_bias) acc += static_cast<Acc>(bias[v]);
          if (cfg.apply_relu && acc < 0) acc = 0;
          out.at(z, v, x, y) = static_cast<T>(acc);
        }
  return out;
}

template Tensor4<float> zero_pad(const Tensor4<float>&, int);
template Tensor4<double> zero_pad(const Tensor4<double>&, int);
template Tensor4<float> dense_conv(const Tensor4<float>&, const Tensor4<float>&,
                                   std::span<const float>, const ConvConfig&);
template Tensor4<double> dense_conv(const Tensor4<double>&, const Tensor4<double>&,
                                    std::span<const double>, const ConvConfig&);

}  // namespace psconv
