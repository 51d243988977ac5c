#include <gtest/gtest.h>

#include <set>

#include "psconv/error.hpp"
#include "psconv/patterns.hpp"

using namespace psconv;

namespace {

std::vector<Cell> cells(std::initializer_list<std::pair<int, int>> rc) {
  std::vector<Cell> out;
  for (auto [r, c] : rc) out.push_back({r, c});
  return out;
}

}  // namespace

TEST(KernelPattern, SortsAndValidates) {
  KernelPattern p(3, cells({{2, 1}, {0, 0}}));
  EXPECT_EQ(p.support(), cells({{0, 0}, {2, 1}}));
  EXPECT_TRUE(p.contains(2, 1));
  EXPECT_FALSE(p.contains(1, 1));
  EXPECT_THROW(KernelPattern(3, cells({{0, 0}, {0, 0}})), InvalidArgument);
  EXPECT_THROW(KernelPattern(3, cells({{3, 0}})), InvalidArgument);
  EXPECT_TRUE(KernelPattern::full(3).is_fc());
}

// Frozen against tests/oracles/variant_draws.py.
TEST(GenerateVariants, FrozenDrawSeed42) {
  const auto v = generate_variants(3, 2, 6, 42);
  const std::vector<std::vector<Cell>> expected = {
      cells({{2, 0}, {2, 1}}), cells({{1, 2}, {2, 2}}), cells({{0, 0}, {0, 1}}),
      cells({{1, 0}, {1, 1}}), cells({{0, 2}, {2, 0}}), cells({{0, 1}, {2, 2}})};
  ASSERT_EQ(v.size(), expected.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i].support(), expected[i]) << "variant " << i;
}

TEST(BuildSchedule, FrozenDropSequence) {
  const auto s = build_schedule(3, 1, 8, 8, 1, 42);
  ASSERT_EQ(s.variants.size(), 8u);
  EXPECT_TRUE(s.variants[0].is_fc());
  const std::vector<Cell> expected = cells({{2, 0}, {2, 1}, {1, 2}, {2, 2}, {0, 1}, {0, 0}, {1, 1}});
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(s.variants[i + 1].support(), std::vector<Cell>{expected[i]}) << "slot " << i + 1;
  }
}

TEST(BuildSchedule, FrozenReuseSequence) {
  const auto s = build_schedule(3, 4, 5, 8, 1, 1);
  const std::vector<std::vector<Cell>> expected = {
      cells({{0, 2}, {1, 1}, {2, 0}, {2, 2}}), cells({{0, 1}, {1, 0}, {1, 2}, {2, 1}}),
      cells({{0, 0}, {0, 1}, {2, 0}, {2, 1}}), cells({{0, 2}, {1, 0}, {1, 1}, {2, 2}}),
      cells({{0, 1}, {1, 2}, {2, 0}, {2, 2}}), cells({{0, 2}, {1, 1}, {2, 0}, {2, 2}}),
      cells({{0, 0}, {0, 1}, {2, 0}, {2, 1}})};
  ASSERT_EQ(s.variants.size(), 8u);
  EXPECT_TRUE(s.variants[0].is_fc());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(s.variants[i + 1].support(), expected[i]);
  EXPECT_EQ(s.weights_per_period(), 7 * 4 + 9);
}

TEST(BuildSchedule, ForcedPermutationForKss1Kvs9) {
  const auto s = build_schedule(3, 1, 9, 9, 0, 7);
  std::set<Cell> seen;
  for (const auto& v : s.variants) {
    ASSERT_EQ(v.size(), 1u);
    seen.insert(v.support()[0]);
  }
  EXPECT_EQ(seen.size(), 9u);
  EXPECT_TRUE(s.covers_all_cells());
}

TEST(BuildSchedule, RejectsInfeasibleCoverage) {
  EXPECT_THROW(generate_variants(3, 2, 3, 1), CoverageInfeasible);
  EXPECT_THROW(build_schedule(3, 2, 3, 3, 0, 1), CoverageInfeasible);
  // Dropping surplus variants may not shrink the union below the kernel.
  EXPECT_THROW(build_schedule(3, 1, 9, 8, 0, 1), CoverageInfeasible);
}

TEST(BuildSchedule, RejectsBadParameters) {
  EXPECT_THROW(build_schedule(3, 1, 8, 8, 2, 1), InvalidArgument);
  EXPECT_THROW(build_schedule(3, 0, 8, 8, 1, 1), InvalidArgument);
  EXPECT_THROW(build_schedule(3, 10, 8, 8, 1, 1), InvalidArgument);
  EXPECT_THROW(build_schedule(3, 1, 0, 8, 1, 1), InvalidArgument);
  EXPECT_THROW(build_schedule(3, 1, 8, 0, 1, 1), InvalidArgument);
}

TEST(BuildSchedule, SeedDeterminism) {
  EXPECT_EQ(build_schedule(3, 2, 7, 8, 1, 99), build_schedule(3, 2, 7, 8, 1, 99));
  EXPECT_NE(build_schedule(3, 2, 7, 8, 1, 99), build_schedule(3, 2, 7, 8, 1, 100));
}

// Properties over a grid of parameters.
TEST(BuildSchedule, StructuralInvariants) {
  for (int kss : {1, 2, 4, 5, 9}) {
    for (int period : {4, 8, 9, 16}) {
      for (int eta : {0, 1}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const int kvs = std::max(1, period - eta);
          if (eta == 0 && kss * kvs < 9) continue;
          const auto s = build_schedule(3, kss, kvs, period, eta, seed);
          ASSERT_EQ(static_cast<int>(s.variants.size()), period);
          for (int i = 0; i < period; ++i) {
            const auto& v = s.variants[static_cast<std::size_t>(i)];
            EXPECT_EQ(static_cast<int>(v.size()), i < eta ? 9 : kss);
          }
          if (eta == 0) EXPECT_TRUE(s.covers_all_cells());
          EXPECT_EQ(s.weights_per_period(), (period - eta) * kss + eta * 9);
          EXPECT_NO_THROW(s.validate());
        }
      }
    }
  }
}

TEST(ExpandMask, RotationByFilter) {
  const auto s = build_schedule(3, 3, 4, 4, 0, 5);
  const LayerMask m = expand_mask(s, 8, 6);
  for (std::size_t f = 0; f < 6; ++f) {
    for (std::size_t c = 0; c < 8; ++c) {
      const auto& v = s.variants[(c + f) % 4];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(m.at(f, c, i, j), v.contains(i, j));
    }
  }
  EXPECT_EQ(m.popcount(), 6u * 8u * 3u);
}

TEST(ExpandMask, WarnsWhenPeriodDoesNotDivideChannels) {
  const auto s = build_schedule(3, 1, 7, 8, 1, 5);
  std::vector<std::string> warnings;
  expand_mask(s, 12, 4, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  warnings.clear();
  expand_mask(s, 16, 4, &warnings);
  EXPECT_TRUE(warnings.empty());
}

TEST(ExpandMask, BoostedFilterNonZeroCountsBalanced) {
  // With P | C_i every filter sees each slot equally often.
  const auto s = build_schedule(3, 1, 7, 8, 1, 2);
  const LayerMask m = expand_mask(s, 32, 10);
  for (std::size_t f = 0; f < 10; ++f) EXPECT_EQ(m.filter_nnz(f), 4u * 16u);
}

TEST(ApplyMask, ZeroesMaskedPositionsOnly) {
  const auto s = build_schedule(3, 4, 3, 3, 0, 8);
  const LayerMask m = expand_mask(s, 3, 2);
  Tensor4D w(m.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = 1.0f + static_cast<float>(i);
  const Tensor4D out = apply_mask(w, m);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(out.values()[i], m.bits()[i] ? w.values()[i] : 0.0f);
  }
  EXPECT_THROW(apply_mask(Tensor4D(Shape4{2, 3, 3, 2}), m), ShapeError);
}
