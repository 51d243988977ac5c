#include "psconv/analyzer.hpp"

#include <algorithm>
#include <cmath>

#include "psconv/error.hpp"

namespace psconv {

namespace {

std::uint64_t kk(int k) { return static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k); }

LayerSpec spec_for(const NetLayer& l, const SparsityConfig& s, bool sparse) {
  LayerSpec spec;
  spec.k = l.k;
  spec.in_channels = static_cast<std::uint64_t>(l.in_channels);
  spec.out_channels = static_cast<std::uint64_t>(l.out_channels);
  spec.out_height = static_cast<std::uint64_t>(l.out_height);
  spec.out_width = static_cast<std::uint64_t>(l.out_width);
  if (!sparse || s.kss == l.k * l.k) {
    spec.kind = l.k == 1 ? LayerKind::Pointwise : LayerKind::ConvSfcc;
  } else if (s.period > 0 && s.eta > 0) {
    spec.kind = LayerKind::ConvPsd;
    spec.kss = s.kss;
    spec.period = s.period;
    spec.eta = s.eta;
  } else {
    spec.kind = LayerKind::ConvSparse;
    spec.kss = s.kss;
  }
  return spec;
}

double pct(double reduced, double base) { return base == 0.0 ? 0.0 : 100.0 * (1.0 - reduced / base); }

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::ConvSfcc: return "conv_sfcc";
    case LayerKind::ConvSparse: return "conv_sparse";
    case LayerKind::ConvPsd: return "conv_psd";
    case LayerKind::DwcPwc: return "dwc_pwc";
    case LayerKind::GwcPwc: return "gwc_pwc";
    case LayerKind::Pointwise: return "pointwise";
  }
  return "unknown";
}

void LayerSpec::validate() const {
  if (k < 1 || in_channels == 0 || out_channels == 0 || out_height == 0 || out_width == 0) {
    throw InvalidArgument("layer extents must be positive");
  }
  switch (kind) {
    case LayerKind::ConvSparse:
    case LayerKind::ConvPsd:
      if (kss < 1 || kss > k * k) {
        throw InvalidArgument("kss must lie in [1, k^2], got " + std::to_string(kss));
      }
      if (kind == LayerKind::ConvPsd && (period < 1 || eta < 0 || eta > period)) {
        throw InvalidArgument("psd layer needs period >= 1 and 0 <= eta <= period");
      }
      break;
    case LayerKind::GwcPwc:
      if (groups < 1) throw InvalidArgument("gwc_pwc layer needs a group count G");
      if (in_channels % static_cast<std::uint64_t>(groups) != 0) {
        throw InvalidArgument("G = " + std::to_string(groups) + " does not divide C_i = " +
                              std::to_string(in_channels));
      }
      break;
    default:
      break;
  }
}

std::uint64_t fc_kernel_count(std::uint64_t in_channels, std::uint64_t out_channels, int period, int eta) {
  if (period < 1 || eta < 0 || eta > period) throw InvalidArgument("need period >= 1 and 0 <= eta <= period");
  const auto p = static_cast<std::uint64_t>(period);
  const auto e = static_cast<std::uint64_t>(eta);
  const std::uint64_t full = in_channels / p;
  const std::uint64_t rem = in_channels % p;
  std::uint64_t total = 0;
  for (std::uint64_t r = 0; r < p && r < out_channels; ++r) {
    // Filters f with f mod P == r share the same channel-slot layout.
    const std::uint64_t filters = out_channels / p + (r < out_channels % p ? 1 : 0);
    std::uint64_t per_filter = full * e;
    for (std::uint64_t j = 0; j < rem; ++j)
      if ((j + r) % p < e) ++per_filter;
    total += filters * per_filter;
  }
  return total;
}

std::uint64_t params_layer(const LayerSpec& spec) {
  spec.validate();
  const std::uint64_t ci = spec.in_channels;
  const std::uint64_t co = spec.out_channels;
  switch (spec.kind) {
    case LayerKind::ConvSfcc:
      return kk(spec.k) * ci * co;
    case LayerKind::ConvSparse:
      return ci * co * static_cast<std::uint64_t>(spec.kss);
    case LayerKind::ConvPsd: {
      const std::uint64_t fc = fc_kernel_count(ci, co, spec.period, spec.eta);
      return fc * kk(spec.k) + (ci * co - fc) * static_cast<std::uint64_t>(spec.kss);
    }
    case LayerKind::DwcPwc:
      return ci * (kk(spec.k) + co);
    case LayerKind::GwcPwc:
      return co * (ci / static_cast<std::uint64_t>(spec.groups)) * kk(spec.k) + co * ci;
    case LayerKind::Pointwise:
      return co * ci;
  }
  return 0;
}

std::uint64_t flops_layer(const LayerSpec& spec) {
  return params_layer(spec) * spec.out_height * spec.out_width;
}

int weights_per_period(int k, int n, int period, int eta) {
  if (period < 1 || eta < 0 || eta > period) throw InvalidArgument("need period >= 1 and 0 <= eta <= period");
  return (period - eta) * n + eta * k * k;
}

double flop_ratio_mobilenet(int k, int n, int period, std::uint64_t out_channels) {
  const double p = period;
  const double k2 = static_cast<double>(k) * k;
  const double co = static_cast<double>(out_channels);
  return p * (k2 + co) / ((k2 + (p - 1) * n) * co);
}

double flop_ratio_shufflenet(int k, int n, int period, int groups) {
  const double p = period;
  const double k2 = static_cast<double>(k) * k;
  return p * (k2 / groups + 1) / (k2 + (p - 1) * n);
}

double flop_ratio_mobilenet_limit(int n) { return 1.0 / n; }

double flop_ratio_shufflenet_limit(int k, int n, int groups) {
  return (static_cast<double>(k) * k / groups + 1) / n;
}

void SparsityConfig::validate(int k) const {
  if (kss < 1 || kss > k * k) throw InvalidArgument("kss must lie in [1, " + std::to_string(k * k) + "]");
  if (period < 0) throw InvalidArgument("period must be non-negative");
  if (eta < 0 || eta > 1) throw InvalidArgument("only eta in {0, 1} is supported");
  if (period == 0 && eta != 0) throw InvalidArgument("FC boosting (eta = 1) needs a period");
}

double SparsityConfig::closed_form_reduction(int k) const {
  validate(k);
  const double k2 = static_cast<double>(k) * k;
  if (period > 0 && eta > 0) return 1.0 - weights_per_period(k, kss, period, eta) / (period * k2);
  return 1.0 - kss / k2;
}

std::string SparsityConfig::label() const {
  if (period == 0) return "pSC" + std::to_string(kss);
  return (eta > 0 ? "PSD" : "PS") + std::to_string(kss) + "_P" + std::to_string(period);
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

CostReport param_count(const NetworkSpec& net, const SparsityConfig& sparsity) {
  net.validate();
  sparsity.validate(3);
  CostReport rep;
  rep.network = net.name;
  rep.alpha = net.alpha;
  rep.sparsity = sparsity;
  rep.stage_widths = net.stage_widths;
  for (const auto& l : net.layers) {
    const bool eligible = l.role == LayerRole::Body && l.k > 1;
    if (eligible) sparsity.validate(l.k);
    LayerCost c;
    c.name = l.name;
    c.k = l.k;
    c.in_channels = static_cast<std::uint64_t>(l.in_channels);
    c.out_channels = static_cast<std::uint64_t>(l.out_channels);
    c.out_height = static_cast<std::uint64_t>(l.out_height);
    c.out_width = static_cast<std::uint64_t>(l.out_width);
    const LayerSpec dense = spec_for(l, sparsity, false);
    const LayerSpec sparse = spec_for(l, sparsity, eligible);
    c.sparse = eligible && sparse.kind != dense.kind;
    c.dense_params = params_layer(dense);
    c.sparse_params = params_layer(sparse);
    c.dense_flops = flops_layer(dense);
    c.sparse_flops = flops_layer(sparse);
    c.density = static_cast<double>(c.sparse_params) / static_cast<double>(c.dense_params);
    rep.dense_params += c.dense_params;
    rep.sparse_params += c.sparse_params;
    rep.dense_flops += c.dense_flops;
    rep.sparse_flops += c.sparse_flops;
    rep.layers.push_back(std::move(c));
  }
  for (const auto& h : net.head) {
    rep.head_params += static_cast<std::uint64_t>(h.in_features) * static_cast<std::uint64_t>(h.out_features);
  }
  rep.reduction_pct = pct(static_cast<double>(rep.sparse_params), static_cast<double>(rep.dense_params));
  rep.closed_form_reduction_pct = 100.0 * sparsity.closed_form_reduction(3);
  rep.flop_reduction_pct = pct(static_cast<double>(rep.sparse_flops), static_cast<double>(rep.dense_flops));
  return rep;
}

CostReport network_storage(const NetworkSpec& net, const SparsityConfig& sparsity, const StorageOptions& opts) {
  CostReport rep = param_count(net, sparsity);
  rep.storage = opts;
  if (is_periodic(opts.format) && sparsity.period == 0) {
    throw InvalidArgument("periodic format " + std::string(format_name(opts.format)) +
                          " needs a periodic sparsity configuration");
  }
  for (auto& c : rep.layers) {
    c.dense_bits = static_cast<double>(c.dense_params) * opts.value_bits;
    if (!c.sparse || opts.format == Format::Dense) {
      c.storage_bits = c.dense_bits;
    } else {
      const MatrixDims whole{c.out_channels, c.in_channels * kk(c.k)};
      const MatrixDims piece = opts.tile.value_or(whole);
      BitWidths widths;
      if (opts.widths) {
        widths = *opts.widths;
      } else {
        widths = BitWidths::minimal_for(piece, opts.value_bits);
        widths.period = opts.period_bits;
      }
      std::optional<std::size_t> period;
      const auto p = static_cast<std::size_t>(sparsity.period);
      if (opts.format == Format::CsrP) period = std::min(p, piece.rows);
      // A tile holds one kernel row (k columns) per kernel.
      if (opts.format == Format::CscP) {
        period = std::min(p * static_cast<std::size_t>(opts.tile ? c.k : c.k * c.k), piece.cols);
      }
      const double pieces = static_cast<double>(whole.rows * whole.cols) / static_cast<double>(piece.rows * piece.cols);
      c.storage_bits = pieces * storage_bits(piece, c.density, opts.format, widths, period);
      rep.widths_used = widths;
    }
    rep.storage_bits += c.storage_bits;
    rep.dense_bits += c.dense_bits;
  }
  rep.normalized_storage = rep.dense_bits == 0.0 ? 1.0 : rep.storage_bits / rep.dense_bits;
  return rep;
}

}  // namespace psconv
