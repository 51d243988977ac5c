#include "psconv/engine.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace psconv {

SparseConvLayer::SparseConvLayer(SparseMatrix weights, std::vector<float> bias, ConvConfig cfg, int k,
                                 std::size_t in_channels, std::size_t out_channels)
    : weights_(std::move(weights)),
      bias_(std::move(bias)),
      cfg_(cfg),
      k_(k),
      in_channels_(in_channels),
      out_channels_(out_channels) {
  if (weights_.format != Format::Csr && weights_.format != Format::CsrP) {
    throw UnsupportedFormat("sparse convolution needs CSR or CSR_P weights, got " +
                            std::string(format_name(weights_.format)));
  }
  if (k < 1 || in_channels == 0 || out_channels == 0) throw InvalidArgument("layer geometry must be positive");
  const std::size_t kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  if (weights_.rows != out_channels || weights_.cols != kk * in_channels) {
    throw ShapeError("weights are " + std::to_string(weights_.rows) + "x" + std::to_string(weights_.cols) +
                     ", layer geometry needs " + std::to_string(out_channels) + "x" +
                     std::to_string(kk * in_channels));
  }
  if (cfg_.apply_bias && bias_.size() != out_channels) {
    throw ShapeError("bias length " + std::to_string(bias_.size()) + " does not match C_o " +
                     std::to_string(out_channels));
  }
  // Reject malformed vectors up front so execution can index without checks.
  (void)decode(weights_);
}

template <typename T>
Tensor4<T> sparse_conv(const SparseConvLayer& layer, const Tensor4<T>& input, MultiplyCounter* counter,
                       unsigned threads) {
  using Acc = accumulator_t<T>;
  const auto k = static_cast<std::size_t>(layer.k());
  if (input.shape().c != layer.in_channels()) {
    throw ShapeError("input has " + std::to_string(input.shape().c) + " channels, layer expects " +
                     std::to_string(layer.in_channels()));
  }
  const Shape4 out_shape =
      conv_output_shape(input.shape(), Shape4{layer.out_channels(), layer.in_channels(), k, k}, layer.config());
  const Tensor4<T> padded = zero_pad(input, layer.config().padding);
  const auto& ps = padded.shape();
  const SparseMatrix& w = layer.weights();
  const std::size_t period = w.format == Format::CsrP ? w.period : w.rows;

  // Offsets into one padded image for every stored column of the first
  // `period` rows; later rows reuse them through r mod period.
  std::vector<std::size_t> offsets(w.col.size());
  for (std::size_t t = 0; t < w.col.size(); ++t) {
    const std::size_t col = w.col[t];
    const std::size_t c = col / (k * k);
    const std::size_t i = (col % (k * k)) / k;
    const std::size_t j = col % k;
    offsets[t] = (c * ps.h + i) * ps.w + j;
  }

  Tensor4<T> out(out_shape);
  const ConvConfig& cfg = layer.config();
  const auto run_filters = [&](std::size_t f_begin, std::size_t f_end, std::uint64_t& tally) {
    for (std::size_t z = 0; z < out_shape.n; ++z) {
      const std::size_t image = padded.offset(z, 0, 0, 0);
      for (std::size_t f = f_begin; f < f_end; ++f) {
        const std::size_t src = f % period;
        const std::size_t len = w.index[f + 1] - w.index[f];
        const float* vals = w.data.data() + w.index[f];
        const std::size_t* offs = offsets.data() + w.index[src];
        for (std::size_t x = 0; x < out_shape.h; ++x)
          for (std::size_t y = 0; y < out_shape.w; ++y) {
            const T* base = padded.data().data() + image + x * ps.w + y;
            Acc acc = 0;
            for (std::size_t t = 0; t < len; ++t) acc += static_cast<Acc>(base[offs[t]]) * static_cast<Acc>(vals[t]);
            tally += len;
            if (cfg.apply_bias) acc += static_cast<Acc>(layer.bias()[f]);
            if (cfg.apply_relu && acc < 0) acc = 0;
            out.at(z, f, x, y) = static_cast<T>(acc);
          }
      }
    }
  };

  const std::size_t filters = layer.out_channels();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, filters);
  const std::size_t chunk = (filters + workers - 1) / workers;
  std::vector<std::uint64_t> tallies((filters + chunk - 1) / chunk, 0);
  if (tallies.size() == 1) {
    run_filters(0, filters, tallies[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t b = 0, t = 0; b < filters; b += chunk, ++t)
      pool.emplace_back(run_filters, b, std::min(filters, b + chunk), std::ref(tallies[t]));
    for (auto& th : pool) th.join();
  }
  if (counter != nullptr) {
    for (std::uint64_t t : tallies) counter->multiplies += t;
  }
  return out;
}

std::uint64_t count_multiplies(const SparseConvLayer& layer, const Shape4& input_shape) {
  const auto k = static_cast<std::size_t>(layer.k());
  const Shape4 out = conv_output_shape(input_shape, Shape4{layer.out_channels(), layer.in_channels(), k, k},
                                       layer.config());
  return static_cast<std::uint64_t>(out.n) * out.h * out.w * layer.nnz();
}

template Tensor4<float> sparse_conv(const SparseConvLayer&, const Tensor4<float>&, MultiplyCounter*, unsigned);
template Tensor4<double> sparse_conv(const SparseConvLayer&, const Tensor4<double>&, MultiplyCounter*, unsigned);

}  // namespace psconv
