#include <gtest/gtest.h>

#include <cmath>

#include "psconv/analyzer.hpp"
#include "psconv/error.hpp"

using namespace psconv;

namespace {

LayerSpec conv(LayerKind kind, std::uint64_t ci, std::uint64_t co, std::uint64_t hw, int kss = 0, int period = 0,
               int eta = 1, int groups = 0) {
  LayerSpec s;
  s.kind = kind;
  s.k = 3;
  s.in_channels = ci;
  s.out_channels = co;
  s.out_height = hw;
  s.out_width = hw;
  s.kss = kss;
  s.period = period;
  s.eta = eta;
  s.groups = groups;
  return s;
}

}  // namespace

TEST(FlopsLayer, KindsOnSharedGeometry) {
  EXPECT_EQ(flops_layer(conv(LayerKind::ConvSfcc, 64, 64, 32)), 37748736u);
  EXPECT_EQ(flops_layer(conv(LayerKind::DwcPwc, 64, 64, 32)), 4784128u);
  EXPECT_EQ(flops_layer(conv(LayerKind::ConvPsd, 64, 64, 32, 1, 8, 1)), 8388608u);
  EXPECT_EQ(flops_layer(conv(LayerKind::ConvSparse, 64, 64, 32, 2)), 32u * 32 * 64 * 64 * 2);
  EXPECT_EQ(flops_layer(conv(LayerKind::GwcPwc, 64, 64, 32, 0, 0, 1, 4)), 32u * 32 * 64 * 64 * (9 / 4.0 + 1));
  EXPECT_EQ(flops_layer(conv(LayerKind::Pointwise, 64, 32, 8)), 8u * 8 * 64 * 32);
}

TEST(FlopsLayer, Validation) {
  EXPECT_THROW(flops_layer(conv(LayerKind::GwcPwc, 64, 64, 32)), InvalidArgument);
  EXPECT_THROW(flops_layer(conv(LayerKind::GwcPwc, 64, 64, 32, 0, 0, 1, 3)), InvalidArgument);
  EXPECT_THROW(flops_layer(conv(LayerKind::ConvSparse, 64, 64, 32, 10)), InvalidArgument);
  EXPECT_THROW(flops_layer(conv(LayerKind::ConvPsd, 64, 64, 32, 2, 0)), InvalidArgument);
}

TEST(WeightsPerPeriod, Examples) {
  EXPECT_EQ(weights_per_period(3, 1, 8), 16);
  EXPECT_EQ(weights_per_period(3, 4, 16), 69);
  EXPECT_EQ(weights_per_period(3, 2, 1), 9);
  EXPECT_EQ(weights_per_period(3, 4, 8, 0), 32);
  EXPECT_THROW(weights_per_period(3, 1, 0), InvalidArgument);
}

TEST(FcKernelCount, MatchesBruteForceRotation) {
  for (std::uint64_t ci : {1u, 5u, 8u, 13u, 64u}) {
    for (std::uint64_t co : {1u, 3u, 8u, 17u}) {
      for (int p : {1, 3, 4, 8, 16}) {
        for (int eta = 0; eta <= std::min(p, 2); ++eta) {
          std::uint64_t brute = 0;
          for (std::uint64_t f = 0; f < co; ++f)
            for (std::uint64_t c = 0; c < ci; ++c)
              if ((c + f) % static_cast<std::uint64_t>(p) < static_cast<std::uint64_t>(eta)) ++brute;
          EXPECT_EQ(fc_kernel_count(ci, co, p, eta), brute) << ci << " " << co << " " << p << " " << eta;
        }
      }
    }
  }
}

TEST(FlopRatios, ClosedFormValues) {
  EXPECT_NEAR(flop_ratio_mobilenet(3, 1, 8, 512), 8.0 * 521 / (16.0 * 512), 1e-15);
  EXPECT_NEAR(flop_ratio_mobilenet(3, 1, 10000, 1000000), 1.0, 1e-3);
  EXPECT_NEAR(flop_ratio_shufflenet(3, 1, 100000, 16), 1.5625, 1e-3);
  EXPECT_DOUBLE_EQ(flop_ratio_mobilenet_limit(2), 0.5);
  EXPECT_DOUBLE_EQ(flop_ratio_shufflenet_limit(3, 1, 16), 1.5625);
}

// The ratios equal the quotient of per-layer FLOP counts on any shared geometry.
TEST(FlopRatios, EqualLayerQuotients) {
  for (int n : {1, 2, 4}) {
    for (int p : {2, 4, 8, 16}) {
      for (std::uint64_t ci : {16u, 64u, 256u}) {
        for (std::uint64_t co : {32u, 128u}) {
          const auto psd = static_cast<double>(flops_layer(conv(LayerKind::ConvPsd, ci, co, 14, n, p, 1)));
          const double mob = static_cast<double>(flops_layer(conv(LayerKind::DwcPwc, ci, co, 14))) / psd;
          EXPECT_NEAR(flop_ratio_mobilenet(3, n, p, co) / mob, 1.0, 1e-12);
          for (int g : {1, 2, 4, 8}) {
            const double shuf =
                static_cast<double>(flops_layer(conv(LayerKind::GwcPwc, ci, co, 14, 0, 0, 1, g))) / psd;
            EXPECT_NEAR(flop_ratio_shufflenet(3, n, p, g) / shuf, 1.0, 1e-12);
          }
        }
      }
    }
  }
}

TEST(FlopsLayer, Monotonicity) {
  for (int p : {2, 4, 8, 16}) {
    for (int n = 1; n < 9; ++n) {
      const auto a = flops_layer(conv(LayerKind::ConvPsd, 64, 64, 8, n, p, 1));
      const auto b = flops_layer(conv(LayerKind::ConvPsd, 64, 64, 8, n + 1, p, 1));
      EXPECT_LE(a, b);
      if (p < 16) EXPECT_GE(a, flops_layer(conv(LayerKind::ConvPsd, 64, 64, 8, n, p * 2, 1)));
    }
  }
}

TEST(ParamCount, DenseTotals) {
  const auto vgg = param_count(builtin_network("vgg16-cifar"), {});
  EXPECT_EQ(vgg.dense_params, 14710464u);
  EXPECT_NEAR(vgg.dense_params / 14.73e6, 1.0, 0.005);
  EXPECT_EQ(vgg.head_params, 5120u);
  const auto res = param_count(builtin_network("resnet18"), {});
  EXPECT_EQ(res.dense_params, 11159232u);
  EXPECT_NEAR(res.dense_params / 11.17e6, 1.0, 0.005);
  EXPECT_EQ(vgg.sparse_params, vgg.dense_params);
}

TEST(ParamCount, TotalsAreLayerSums) {
  const auto r = param_count(builtin_network("resnet18"), SparsityConfig{2, 8, 1});
  std::uint64_t dp = 0, sp = 0, df = 0, sf = 0;
  for (const auto& l : r.layers) {
    dp += l.dense_params;
    sp += l.sparse_params;
    df += l.dense_flops;
    sf += l.sparse_flops;
  }
  EXPECT_EQ(dp, r.dense_params);
  EXPECT_EQ(sp, r.sparse_params);
  EXPECT_EQ(df, r.dense_flops);
  EXPECT_EQ(sf, r.sparse_flops);
  EXPECT_FALSE(r.layers.front().sparse);  // first layer stays dense
}

TEST(ParamCount, ClosedFormReductions) {
  struct Row {
    int kss, period, eta;
    double pct;
    int decimals;
  };
  const Row rows[] = {{4, 0, 0, 55.56, 2}, {2, 0, 0, 77.78, 2},  {1, 0, 0, 88.89, 2},  {4, 8, 1, 48.61, 2},
                      {4, 16, 1, 52.1, 1}, {2, 8, 1, 68.1, 1},   {2, 16, 1, 72.92, 2}, {1, 8, 1, 77.78, 2},
                      {1, 16, 1, 83.33, 2}, {4, 4, 1, 41.67, 2}, {2, 6, 1, 64.81, 2},  {1, 9, 1, 79, 0}};
  for (const auto& row : rows) {
    const SparsityConfig s{row.kss, row.period, row.eta};
    const auto r = param_count(builtin_network("vgg16-cifar"), s);
    EXPECT_DOUBLE_EQ(round_to(r.closed_form_reduction_pct, row.decimals), row.pct) << s.label();
  }
  // Unboosted reductions are exactly 1 - n/k^2.
  EXPECT_DOUBLE_EQ((SparsityConfig{4, 8, 0}.closed_form_reduction(3)), 1.0 - 4.0 / 9.0);
  EXPECT_DOUBLE_EQ((SparsityConfig{1, 16, 1}.closed_form_reduction(3)), 1.0 - 24.0 / 144.0);
}

TEST(ParamCount, VggPsd1P8Flops) {
  const auto r = param_count(builtin_network("vgg16-cifar"), SparsityConfig{1, 8, 1});
  EXPECT_EQ(r.sparse_flops, 70975488u);
  EXPECT_NEAR(r.sparse_flops / 0.073e9, 1.0, 0.05);
}

TEST(SparsityConfig, LabelsAndValidation) {
  EXPECT_EQ((SparsityConfig{4, 0, 0}.label()), "pSC4");
  EXPECT_EQ((SparsityConfig{2, 6, 0}.label()), "PS2_P6");
  EXPECT_EQ((SparsityConfig{1, 16, 1}.label()), "PSD1_P16");
  EXPECT_THROW((SparsityConfig{1, 0, 1}.validate(3)), InvalidArgument);
  EXPECT_THROW((SparsityConfig{1, 8, 2}.validate(3)), InvalidArgument);
  EXPECT_THROW((SparsityConfig{0, 8, 1}.validate(3)), InvalidArgument);
}

TEST(NetworkStorage, TableXWithinTolerance) {
  struct Row {
    int kss, period;
    double csr_p, csr;
  };
  const Row rows[] = {{4, 8, 0.66, 0.85}, {4, 16, 0.69, 0.81}, {1, 8, 0.34, 0.42}, {1, 16, 0.30, 0.35}};
  const auto net = builtin_network("vgg16-cifar");
  for (const auto& row : rows) {
    const SparsityConfig s{row.kss, row.period, 1};
    StorageOptions opts;
    opts.format = Format::CsrP;
    EXPECT_NEAR(network_storage(net, s, opts).normalized_storage, row.csr_p, 0.05) << s.label();
    opts.format = Format::Csr;
    EXPECT_NEAR(network_storage(net, s, opts).normalized_storage, row.csr, 0.05) << s.label();
    opts.format = Format::Dense;
    EXPECT_DOUBLE_EQ(network_storage(net, s, opts).normalized_storage, 1.0);
  }
}

TEST(NetworkStorage, PeriodicFormatNeedsPeriod) {
  StorageOptions opts;
  opts.format = Format::CsrP;
  EXPECT_THROW(network_storage(builtin_network("vgg16-cifar"), SparsityConfig{4, 0, 0}, opts), InvalidArgument);
}

TEST(NetworkStorage, ExplicitWidthsWholeLayer) {
  StorageOptions opts;
  opts.format = Format::Csr;
  opts.tile.reset();
  opts.widths = BitWidths{8, 16, 16, 24, 6};
  const auto r = network_storage(builtin_network("vgg16-cifar"), SparsityConfig{1, 8, 1}, opts);
  double sum = 0.0;
  for (const auto& l : r.layers) sum += l.storage_bits;
  EXPECT_DOUBLE_EQ(sum, r.storage_bits);
  EXPECT_EQ(r.widths_used, *opts.widths);
}
