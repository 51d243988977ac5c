#include <gtest/gtest.h>

#include "psconv/analyzer.hpp"
#include "psconv/engine.hpp"
#include "psconv/error.hpp"
#include "psconv/flatten.hpp"
#include "psconv/rng.hpp"

using namespace psconv;

namespace {

struct Layer {
  Tensor4D weights;  // masked
  Tensor4D input;
  std::vector<float> bias;
};

Layer make_layer(int kss, int period, int eta, std::size_t ci, std::size_t co, std::size_t hw, std::uint64_t seed) {
  const auto s = build_schedule(3, kss, eta == 0 ? period : period - 1, period, eta, seed);
  const LayerMask mask = expand_mask(s, ci, co);
  Xoshiro256 rng(seed);
  Tensor4D w(mask.shape());
  for (auto& v : w.data()) v = static_cast<float>(rng.symmetric_unit()) + 1.5f;
  Tensor4D in(Shape4{1, ci, hw, hw});
  for (auto& v : in.data()) v = static_cast<float>(rng.symmetric_unit());
  std::vector<float> bias(co);
  for (auto& v : bias) v = static_cast<float>(rng.symmetric_unit());
  return {apply_mask(w, mask), in, bias};
}

}  // namespace

TEST(SparseConv, BitwiseEqualsDenseOnMaskedWeights) {
  for (Format f : {Format::Csr, Format::CsrP}) {
    for (unsigned threads : {1u, 3u}) {
      const Layer l = make_layer(3, 4, 0, 8, 12, 7, 21);
      const auto m = flatten(l.weights);
      const ConvConfig cfg = ConvConfig::same(3, true, true);
      SparseConvLayer layer(encode(m, f, f == Format::CsrP ? 4u : 0u), l.bias, cfg, 3, 8, 12);
      const auto sparse = sparse_conv(layer, l.input, nullptr, threads);
      const auto dense = dense_conv<float>(l.input, l.weights, l.bias, cfg);
      EXPECT_EQ(sparse, dense) << format_name(f) << " threads " << threads;
    }
  }
}

TEST(SparseConv, DoublePrecisionPath) {
  const Layer l = make_layer(4, 8, 1, 8, 8, 5, 2);
  const auto m = flatten(l.weights);
  SparseConvLayer layer(encode(m, Format::Csr), {}, ConvConfig::same(3), 3, 8, 8);
  std::vector<double> in_d(l.input.values().begin(), l.input.values().end());
  std::vector<double> w_d(l.weights.values().begin(), l.weights.values().end());
  const Tensor4<double> in(l.input.shape(), in_d);
  const auto out = sparse_conv(layer, in);
  const auto ref = dense_conv<double>(in, Tensor4<double>(l.weights.shape(), w_d), {}, ConvConfig::same(3));
  EXPECT_EQ(out, ref);
}

TEST(SparseConv, MultiplyCountMatchesClosedForm) {
  // psd, P = 8, n = 1, C_i = C_o = 64, 32x32 output.
  const Layer l = make_layer(1, 8, 1, 64, 64, 32, 3);
  SparseConvLayer layer(encode(flatten(l.weights), Format::CsrP, 8), {}, ConvConfig::same(3), 3, 64, 64);
  MultiplyCounter counter;
  sparse_conv(layer, l.input, &counter, 2);
  EXPECT_EQ(counter.multiplies, 8388608u);
  EXPECT_EQ(count_multiplies(layer, l.input.shape()), 8388608u);
  LayerSpec spec{LayerKind::ConvPsd, 3, 64, 64, 32, 32, 0, 1, 8, 1};
  EXPECT_EQ(flops_layer(spec), counter.multiplies);
}

TEST(SparseConvLayer, RejectsBadConstruction) {
  const Layer l = make_layer(3, 4, 0, 4, 4, 3, 1);
  const auto m = flatten(l.weights);
  EXPECT_THROW(SparseConvLayer(encode(m, Format::Coo), {}, ConvConfig::same(3), 3, 4, 4), UnsupportedFormat);
  EXPECT_THROW(SparseConvLayer(encode(m, Format::Csc), {}, ConvConfig::same(3), 3, 4, 4), UnsupportedFormat);
  EXPECT_THROW(SparseConvLayer(encode(m, Format::Csr), {}, ConvConfig::same(3), 3, 5, 4), ShapeError);
  EXPECT_THROW(SparseConvLayer(encode(m, Format::Csr), {1.0f}, ConvConfig::same(3, false, true), 3, 4, 4),
               ShapeError);
  auto broken = encode(m, Format::Csr);
  broken.col[0] = 1000;
  EXPECT_THROW(SparseConvLayer(broken, {}, ConvConfig::same(3), 3, 4, 4), FormatCorruption);
}

TEST(SparseConv, InputChannelMismatch) {
  const Layer l = make_layer(3, 4, 0, 4, 4, 3, 1);
  SparseConvLayer layer(encode(flatten(l.weights), Format::Csr), {}, ConvConfig::same(3), 3, 4, 4);
  EXPECT_THROW(sparse_conv(layer, Tensor4D(Shape4{1, 3, 3, 3})), ShapeError);
}
