#include <gtest/gtest.h>

#include "psconv/error.hpp"
#include "psconv/storage_cost.hpp"

using namespace psconv;

namespace {

const MatrixDims kTile{32, 12};
const BitWidths kFig{8, 4, 4, 7, 6};

}  // namespace

TEST(StorageBits, ClosedForms) {
  const double rho = 0.5;
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::Dense, kFig), 32 * 12 * 8);
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::Coo, kFig), 192.0 * 16);
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::Csr, kFig), 192.0 * 12 + 33 * 7);
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::Csc, kFig), 192.0 * 12 + 13 * 7);
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::CsrP, kFig, 8), 192.0 * 8 + 0.5 * 8 * 12 * 4 + 33 * 7 + 6);
  EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::CscP, kFig, 4), 192.0 * 8 + 0.5 * 4 * 32 * 4 + 13 * 7 + 6);
  EXPECT_THROW(storage_bits(kTile, rho, Format::CsrP, kFig), InvalidArgument);
  EXPECT_THROW(storage_bits(kTile, 1.5, Format::Csr, kFig), InvalidArgument);
}

TEST(StorageBits, PeriodicAtFullPeriodEqualsPlainPlusPeriodField) {
  for (double rho : {0.1, 0.4, 0.9}) {
    EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::CsrP, kFig, 32),
                     storage_bits(kTile, rho, Format::Csr, kFig) + kFig.period);
    EXPECT_DOUBLE_EQ(storage_bits(kTile, rho, Format::CscP, kFig, 12),
                     storage_bits(kTile, rho, Format::Csc, kFig) + kFig.period);
  }
}

TEST(Crossover, FigureDensities) {
  EXPECT_NEAR(crossover_density(kTile, Format::Csr, kFig).density, 0.6165, 5e-4);
  EXPECT_NEAR(crossover_density(kTile, Format::Csc, kFig).density, 0.6469, 5e-4);
  EXPECT_NEAR(crossover_density(kTile, Format::CsrP, kFig, 8).density, 0.8203, 5e-4);
  EXPECT_NEAR(crossover_density(kTile, Format::CsrP, kFig, 16).density, 0.7383, 5e-4);
  EXPECT_DOUBLE_EQ(crossover_density(kTile, Format::Coo, kFig).density, 0.5);
}

TEST(Crossover, CostsMatchAtRoot) {
  for (Format f : {Format::Coo, Format::Csr, Format::Csc}) {
    const auto x = crossover_density(kTile, f, kFig);
    ASSERT_TRUE(x.crossed);
    EXPECT_NEAR(storage_bits(kTile, x.density, f, kFig), storage_bits(kTile, x.density, Format::Dense, kFig), 1e-9);
  }
}

TEST(Crossover, NeverCrossingClampsToZero) {
  // Index overhead alone exceeds the dense payload.
  const BitWidths heavy{1, 8, 8, 30, 6};
  const auto x = crossover_density({4, 4}, Format::Csr, heavy);
  EXPECT_FALSE(x.crossed);
  EXPECT_DOUBLE_EQ(x.density, 0.0);
}

TEST(AuxOverhead, FigureReductions) {
  const double rho = 0.62;
  const double csr = storage_bits(kTile, rho, Format::Csr, kFig);
  const double p8 = storage_bits(kTile, rho, Format::CsrP, kFig, 8);
  const double p16 = storage_bits(kTile, rho, Format::CsrP, kFig, 16);
  EXPECT_NEAR(100.0 * (1.0 - p8 / csr), 22.93, 0.01);
  EXPECT_NEAR(100.0 * (1.0 - p16 / csr), 15.22, 0.01);
  const double aux = aux_overhead_bits(kTile, rho, Format::Csr, kFig);
  EXPECT_NEAR(100.0 * overhead_reduction(aux, aux_overhead_bits(kTile, rho, Format::CsrP, kFig, 8)), 59.85, 0.01);
  EXPECT_NEAR(100.0 * overhead_reduction(aux, aux_overhead_bits(kTile, rho, Format::CsrP, kFig, 16)), 39.73, 0.01);
  EXPECT_DOUBLE_EQ(aux_overhead_bits(kTile, rho, Format::Dense, kFig), 0.0);
}

TEST(ExactBits, MatchesClosedFormOnConcreteMatrix) {
  FlattenedWeightMatrix m(4, 6, std::vector<float>(24));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      if ((c + r % 2) % 2 == 0) m.at(r, c) = 1.0f;
  const MatrixDims d{4, 6};
  const double rho = m.density();
  for (Format f : {Format::Dense, Format::Coo, Format::Csr, Format::Csc}) {
    EXPECT_DOUBLE_EQ(storage_bits(encode(m, f), kFig), storage_bits(d, rho, f, kFig)) << format_name(f);
  }
  EXPECT_DOUBLE_EQ(storage_bits(encode(m, Format::CsrP, 2), kFig), storage_bits(d, rho, Format::CsrP, kFig, 2));
}

TEST(BitWidths, MinimalAndValidation) {
  EXPECT_EQ(bits_for(0), 1);
  EXPECT_EQ(bits_for(1), 1);
  EXPECT_EQ(bits_for(2), 2);
  EXPECT_EQ(bits_for(255), 8);
  EXPECT_EQ(bits_for(256), 9);
  const auto w = BitWidths::minimal_for(kTile, 8);
  EXPECT_EQ(w.row, 5);
  EXPECT_EQ(w.col, 4);
  EXPECT_EQ(w.index, 9);
  EXPECT_EQ(w.period, 6);
  EXPECT_THROW((BitWidths{8, 0, 4, 7, 6}.validate()), InvalidArgument);
}

TEST(Rlc, AnalyticAndExact) {
  EXPECT_DOUBLE_EQ(rlc_bits(kTile, 0.25, 8, 5), 96.0 * 13);
  FlattenedWeightMatrix m(1, 40, std::vector<float>(40));
  m.at(0, 0) = 1.0f;
  m.at(0, 39) = 2.0f;
  // 38 zeros between: one saturated run of 31 adds a padding entry.
  EXPECT_DOUBLE_EQ(rlc_bits(m, 8, 5), 3.0 * 13);
  EXPECT_THROW(rlc_bits(m, 8, 0), InvalidArgument);
}

// Periodic formats never cost more than plain ones once the saved column
// entries outweigh the period field.
TEST(StorageBits, PeriodicSavingProperty) {
  for (std::size_t p = 1; p <= 32; ++p) {
    for (double rho = 0.05; rho <= 1.0; rho += 0.05) {
      const double gain = rho * static_cast<double>(32 - p) * 12 * kFig.col;
      const double csr = storage_bits(kTile, rho, Format::Csr, kFig);
      const double csrp = storage_bits(kTile, rho, Format::CsrP, kFig, p);
      if (gain > kFig.period) EXPECT_LT(csrp, csr);
      EXPECT_NEAR(csr - csrp, gain - kFig.period, 1e-9);
    }
  }
}
