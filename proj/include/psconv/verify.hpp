#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psconv/sparse_matrix.hpp"

namespace psconv {

/// One randomly drawn sparse layer for the equivalence checks.
struct VerifyCase {
  std::uint64_t seed = 0;
  int size = 8;  // input height and width
  int kss = 1;
  int kvs = 1;
  int period = 4;
  int eta = 0;
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  bool relu = false;
  bool bias = false;
  Format engine_format = Format::Csr;
  unsigned threads = 1;
};

enum class Fault {
  None,
  /// Keeps one masked-out weight in the stored matrix (negative control).
  StoreMaskedWeight,
};

struct VerifyResult {
  VerifyCase spec;
  double max_rel_error = 0.0;
  bool engine_ok = false;        // relative error vs double oracle <= 1e-5
  bool bitwise_ok = false;       // equal to dense_conv on masked weights
  bool multiplies_ok = false;    // instrumentation == count_multiplies
  bool roundtrip_ok = false;     // all six formats and the PSCV container
  bool zero_invariance_ok = false;
  bool stream_ok = false;        // both scratchpad strategies agree
  std::vector<std::string> notes;

  bool passed() const {
    return engine_ok && bitwise_ok && multiplies_ok && roundtrip_ok && zero_invariance_ok && stream_ok;
  }
};

/// Case `index` of a run: kss, P and eta cycle through {1,2,4,9} x {4,8,16} x
/// {0,1} so any 24 consecutive indices cover every combination; the rest is
/// drawn from `seed`. eta = 0 combinations whose variants cannot cover the
/// kernel are run with eta = 1 instead (noted in the result).
VerifyCase make_case(std::size_t index, std::uint64_t seed, int size);

VerifyResult run_case(const VerifyCase& c, Fault fault = Fault::None);

struct VerifySummary {
  std::vector<VerifyResult> results;
  std::size_t failures = 0;
};

/// Runs `count` cases with seeds base_seed + i and sizes cycled from `sizes`.
VerifySummary run_verify(std::size_t count, std::uint64_t base_seed, const std::vector<int>& sizes,
                         Fault fault = Fault::None);

/// "seed=.. kss=.. P=.. eta=.. C_i=.. C_o=.. size=.. fmt=.."
std::string describe(const VerifyCase& c);

}  // namespace psconv
