#include "psconv/verify.hpp"

#include <algorithm>
#include <cmath>

#include "psconv/container.hpp"
#include "psconv/dense_conv.hpp"
#include "psconv/engine.hpp"
#include "psconv/error.hpp"
#include "psconv/flatten.hpp"
#include "psconv/patterns.hpp"
#include "psconv/pesim.hpp"
#include "psconv/rng.hpp"

namespace psconv {

namespace {

constexpr int kKernel = 3;
constexpr int kKss[] = {1, 2, 4, 9};
constexpr int kPeriods[] = {4, 8, 16};

float nonzero_unit(Xoshiro256& rng) {
  const auto v = static_cast<float>(rng.symmetric_unit());
  return v == 0.0f ? 0.5f : v;
}

template <typename To, typename From>
Tensor4<To> cast(const Tensor4<From>& t) {
  std::vector<To> out(t.values().begin(), t.values().end());
  return Tensor4<To>(t.shape(), std::move(out));
}

Tensor4D run_engine(const FlattenedWeightMatrix& m, const VerifyCase& c, const std::vector<float>& bias,
                    const Tensor4D& input, MultiplyCounter* counter) {
  const auto period = c.engine_format == Format::CsrP
                          ? static_cast<std::uint32_t>(std::min<std::size_t>(c.period, m.rows))
                          : 0u;
  SparseConvLayer layer(encode(m, c.engine_format, period), bias, ConvConfig::same(kKernel, c.relu, c.bias),
                        kKernel, c.in_channels, c.out_channels);
  return sparse_conv(layer, input, counter, c.threads);
}

VerifyResult run_case_unchecked(const VerifyCase& c, Fault fault);

}  // namespace

std::string describe(const VerifyCase& c) {
  return "seed=" + std::to_string(c.seed) + " kss=" + std::to_string(c.kss) + " kvs=" + std::to_string(c.kvs) +
         " P=" + std::to_string(c.period) + " eta=" + std::to_string(c.eta) + " C_i=" +
         std::to_string(c.in_channels) + " C_o=" + std::to_string(c.out_channels) + " size=" +
         std::to_string(c.size) + " fmt=" + std::string(format_name(c.engine_format));
}

VerifyCase make_case(std::size_t index, std::uint64_t seed, int size) {
  if (size < 1) throw InvalidArgument("case size must be positive");
  VerifyCase c;
  c.seed = seed;
  c.size = size;
  c.kss = kKss[index % 4];
  c.period = kPeriods[(index / 4) % 3];
  c.eta = static_cast<int>((index / 12) % 2);
  Xoshiro256 rng(seed);
  if (c.eta == 0 && c.kss * c.period < kKernel * kKernel) c.eta = 1;
  const auto p = static_cast<std::uint64_t>(c.period);
  c.kvs = c.eta == 0 ? c.period : 1 + static_cast<int>(rng.below(p + 1));
  c.batch = 1 + rng.below(2);
  c.in_channels = 1 + rng.below(2 * p);
  c.out_channels = p + rng.below(p + 4);
  c.relu = rng.below(2) == 1;
  c.bias = rng.below(2) == 1;
  c.engine_format = rng.below(2) == 1 ? Format::CsrP : Format::Csr;
  c.threads = 1 + static_cast<unsigned>(rng.below(3));
  return c;
}

VerifyResult run_case(const VerifyCase& c, Fault fault) {
  try {
    return run_case_unchecked(c, fault);
  } catch (const Error& e) {
    VerifyResult res;
    res.spec = c;
    res.notes.push_back(std::string("error: ") + e.what());
    return res;
  }
}

namespace {

VerifyResult run_case_unchecked(const VerifyCase& c, Fault fault) {
  VerifyResult res;
  res.spec = c;
  Xoshiro256 rng(c.seed ^ 0x5DEECE66DULL);

  const auto schedule = build_schedule(kKernel, c.kss, c.kvs, c.period, c.eta, c.seed);
  const LayerMask mask = expand_mask(schedule, c.in_channels, c.out_channels, &res.notes);

  const Shape4 wshape{c.out_channels, c.in_channels, kKernel, kKernel};
  Tensor4D weights(wshape);
  for (auto& v : weights.data()) v = nonzero_unit(rng);
  Tensor4D input(Shape4{c.batch, c.in_channels, static_cast<std::size_t>(c.size), static_cast<std::size_t>(c.size)});
  for (auto& v : input.data()) v = static_cast<float>(rng.symmetric_unit());
  std::vector<float> bias;
  if (c.bias) {
    bias.resize(c.out_channels);
    for (auto& v : bias) v = static_cast<float>(rng.symmetric_unit());
  }

  const Tensor4D masked = apply_mask(weights, mask);
  const FlattenedWeightMatrix m = flatten(masked);
  const ConvConfig cfg = ConvConfig::same(kKernel, c.relu, c.bias);

  // Engine against the dense reference and a double-precision oracle.
  MultiplyCounter counter;
  const Tensor4D sparse_out = run_engine(m, c, bias, input, &counter);
  const Tensor4D dense_out = dense_conv<float>(input, masked, bias, cfg);
  const std::vector<double> bias_d(bias.begin(), bias.end());
  const auto oracle = dense_conv<double>(cast<double>(input), cast<double>(masked), bias_d, cfg);
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    scale = std::max(scale, std::abs(oracle.values()[i]));
    worst = std::max(worst, std::abs(static_cast<double>(sparse_out.values()[i]) - oracle.values()[i]));
  }
  res.max_rel_error = scale > 0.0 ? worst / scale : worst;
  res.engine_ok = res.max_rel_error <= 1e-5;
  res.bitwise_ok = sparse_out == dense_out;
  const std::uint64_t expected_mults =
      c.batch * static_cast<std::uint64_t>(c.size) * static_cast<std::uint64_t>(c.size) * m.nnz();
  res.multiplies_ok = counter.multiplies == expected_mults;

  // Exact round trips through every format and the binary container.
  res.roundtrip_ok = true;
  for (Format f : {Format::Dense, Format::Coo, Format::Csr, Format::Csc, Format::CsrP, Format::CscP}) {
    std::uint32_t period = 0;
    if (f == Format::CsrP) period = static_cast<std::uint32_t>(std::min<std::size_t>(c.period, m.rows));
    if (f == Format::CscP) {
      period = static_cast<std::uint32_t>(std::min<std::size_t>(static_cast<std::size_t>(c.period) * 9, m.cols));
    }
    const SparseMatrix s = encode(m, f, period);
    const StoredMatrix back = read_container(write_container(s, fitted_widths(s, 8)));
    const FlattenedWeightMatrix d = decode(s);
    if (d.rows != m.rows || d.cols != m.cols || d.values != m.values || back.matrix != s) {
      res.roundtrip_ok = false;
      res.notes.push_back("round trip failed for " + std::string(format_name(f)));
    }
  }

  // Perturbing masked-out weights must not change anything downstream.
  Tensor4D perturbed = weights;
  bool injected = false;
  for (std::size_t f = 0; f < c.out_channels; ++f)
    for (std::size_t ch = 0; ch < c.in_channels; ++ch)
      for (int i = 0; i < kKernel; ++i)
        for (int j = 0; j < kKernel; ++j)
          if (!mask.at(f, ch, i, j)) perturbed.at(f, ch, i, j) += 1.0f + static_cast<float>(rng.below(8));
  Tensor4D stored = apply_mask(perturbed, mask);
  if (fault == Fault::StoreMaskedWeight) {
    for (std::size_t t = 0; t < mask.bits().size() && !injected; ++t) {
      if (mask.bits()[t] == 0) {
        stored.data()[t] = perturbed.values()[t];
        injected = true;
      }
    }
  }
  const Tensor4D perturbed_out = run_engine(flatten(stored), c, bias, input, nullptr);
  res.zero_invariance_ok = flatten(stored) == m && perturbed_out == sparse_out;
  if (injected) res.notes.push_back("fault injected: masked weight stored");

  // Both scratchpad strategies must feed the multipliers the same weights.
  PeOptions opts;
  opts.widths = fitted_widths(encode(m, Format::Coo), 8);
  opts.widths.index = bits_for(m.rows * m.cols);
  opts.widths.period = bits_for(std::max(m.rows, m.cols));
  opts.period = static_cast<std::uint32_t>(std::min<std::size_t>(c.period, m.rows));
  const auto replicate = simulate_pe(m, Format::CsrP, opts);
  opts.strategy = ScratchpadStrategy::CircularBuffer;
  const auto circular = simulate_pe(m, Format::CsrP, opts);
  opts.strategy = ScratchpadStrategy::ReplicateOnWrite;
  const auto plain = simulate_pe(m, Format::Csr, opts);
  res.stream_ok = replicate.stream == circular.stream && replicate.stream == plain.stream;
  return res;
}

}  // namespace

VerifySummary run_verify(std::size_t count, std::uint64_t base_seed, const std::vector<int>& sizes, Fault fault) {
  if (count == 0) throw InvalidArgument("at least one seed required");
  if (sizes.empty()) throw InvalidArgument("at least one size required");
  VerifySummary sum;
  sum.results.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const VerifyCase c = make_case(i, base_seed + i, sizes[i % sizes.size()]);
    sum.results.push_back(run_case(c, fault));
    if (!sum.results.back().passed()) ++sum.failures;
  }
  return sum;
}

}  // namespace psconv
