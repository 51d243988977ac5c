#include <gtest/gtest.h>

#include "psconv/error.hpp"
#include "psconv/rng.hpp"
#include "psconv/sparse_matrix.hpp"

using namespace psconv;

namespace {

// The 3x7 worked example.
FlattenedWeightMatrix example_m() {
  return FlattenedWeightMatrix(3, 7, {0, 1, 0, 0, 2, 0, 3,  //
                                      4, 0, 0, 5, 6, 0, 7,  //
                                      0, 0, 0, 8, 9, 0, 0});
}

using U = std::vector<std::uint32_t>;
using F = std::vector<float>;

FlattenedWeightMatrix periodic_rows(std::size_t rows, std::size_t cols, std::size_t period, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<std::uint8_t> pattern(period * cols);
  for (auto& p : pattern) p = rng.below(3) == 0 ? 1 : 0;
  FlattenedWeightMatrix m(rows, cols, std::vector<float>(rows * cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (pattern[(r % period) * cols + c]) m.at(r, c) = 1.0f + static_cast<float>(rng.below(100));
  return m;
}

}  // namespace

TEST(Encode, WorkedExampleCoo) {
  const auto s = encode(example_m(), Format::Coo);
  EXPECT_EQ(s.data, F({1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(s.row, U({0, 0, 0, 1, 1, 1, 1, 2, 2}));
  EXPECT_EQ(s.col, U({1, 4, 6, 0, 3, 4, 6, 3, 4}));
  EXPECT_TRUE(s.index.empty());
}

TEST(Encode, WorkedExampleCsr) {
  const auto s = encode(example_m(), Format::Csr);
  EXPECT_EQ(s.data, F({1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(s.col, U({1, 4, 6, 0, 3, 4, 6, 3, 4}));
  EXPECT_EQ(s.index, U({0, 3, 7, 9}));
  EXPECT_TRUE(s.row.empty());
}

TEST(Encode, WorkedExampleCsc) {
  const auto s = encode(example_m(), Format::Csc);
  EXPECT_EQ(s.data, F({4, 1, 5, 8, 2, 6, 9, 3, 7}));
  EXPECT_EQ(s.row, U({1, 0, 1, 2, 0, 1, 2, 0, 1}));
  EXPECT_EQ(s.index, U({0, 1, 2, 2, 4, 7, 7, 9}));
}

TEST(Encode, DenseKeepsEveryValue) {
  const auto s = encode(example_m(), Format::Dense);
  EXPECT_EQ(s.data.size(), 21u);
  EXPECT_EQ(decode(s), example_m());
}

TEST(Encode, CsrPStoresOnePeriodOfColumns) {
  const auto m = periodic_rows(12, 10, 3, 4);
  const auto s = encode(m, Format::CsrP, 3);
  EXPECT_EQ(s.period, 3u);
  EXPECT_EQ(s.index.size(), 13u);
  EXPECT_EQ(s.col.size(), s.index[3]);
  EXPECT_EQ(decode(s), m);
}

TEST(Encode, CscPStoresOnePeriodOfRows) {
  // Transposed construction: columns repeat with period 4.
  const auto t = periodic_rows(8, 6, 4, 5);
  FlattenedWeightMatrix m(6, 8, std::vector<float>(48));
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 6; ++c) m.at(c, r) = t.at(r, c);
  const auto s = encode(m, Format::CscP, 4);
  EXPECT_EQ(s.row.size(), s.index[4]);
  EXPECT_EQ(decode(s), m);
}

TEST(Encode, NotPeriodicNamesOffendingRow) {
  auto m = periodic_rows(8, 5, 2, 6);
  m.at(5, 0) = m.at(5, 0) == 0.0f ? 1.0f : 0.0f;
  try {
    encode(m, Format::CsrP, 2);
    FAIL() << "expected NotPeriodic";
  } catch (const NotPeriodic& e) {
    EXPECT_NE(std::string(e.what()).find("row 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(encode(m, Format::CsrP, 0), InvalidArgument);
  EXPECT_THROW(encode(m, Format::CsrP, 9), InvalidArgument);
}

TEST(Decode, RejectsCorruptVectors) {
  auto s = encode(example_m(), Format::Csr);
  s.index[1] = 5;
  s.index[2] = 4;
  EXPECT_THROW(decode(s), FormatCorruption);
  s = encode(example_m(), Format::Csr);
  s.col[0] = 7;
  EXPECT_THROW(decode(s), FormatCorruption);
  s = encode(example_m(), Format::Coo);
  s.row.pop_back();
  EXPECT_THROW(decode(s), FormatCorruption);
  s = encode(example_m(), Format::Csr);
  s.index.back() = 8;
  EXPECT_THROW(decode(s), FormatCorruption);
}

TEST(FormatNames, RoundTrip) {
  for (Format f : {Format::Dense, Format::Coo, Format::Csr, Format::Csc, Format::CsrP, Format::CscP}) {
    EXPECT_EQ(parse_format(format_name(f)), f);
  }
  EXPECT_EQ(parse_format("CSR-P"), Format::CsrP);
  EXPECT_THROW(parse_format("bcsr"), InvalidArgument);
  EXPECT_TRUE(is_periodic(Format::CscP));
  EXPECT_FALSE(is_periodic(Format::Csr));
}

// Round trips over random periodic matrices of varying density.
TEST(Encode, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Xoshiro256 rng(seed);
    const std::size_t period = 1 + rng.below(5);
    const std::size_t rows = period + rng.below(12);
    const std::size_t cols = 1 + rng.below(15);
    const auto m = periodic_rows(rows, cols, period, seed);
    for (Format f : {Format::Dense, Format::Coo, Format::Csr, Format::Csc, Format::CsrP}) {
      const auto s = encode(m, f, f == Format::CsrP ? static_cast<std::uint32_t>(period) : 0u);
      EXPECT_EQ(decode(s), m) << format_name(f) << " seed " << seed;
      EXPECT_EQ(s.data.size(), f == Format::Dense ? rows * cols : m.nnz());
    }
  }
}
