#include "psconv/storage_cost.hpp"

#include <algorithm>
#include <string>

namespace psconv {

namespace {

std::size_t require_period(Format format, std::optional<std::size_t> period) {
  if (!period || *period == 0) {
    throw InvalidArgument(std::string("format ") + std::string(format_name(format)) +
                          " needs a period");
  }
  return *period;
}

}  // namespace

void BitWidths::validate() const {
  if (value < 1 || row < 1 || col < 1 || index < 1 || period < 1) {
    throw InvalidArgument("bit widths must all be at least 1");
  }
}

int bits_for(std::size_t max_value) {
  int bits = 1;
  while (bits < 64 && (max_value >> bits) != 0) ++bits;
  return bits;
}

BitWidths BitWidths::minimal_for(MatrixDims dims, int value_bits) {
  BitWidths w;
  w.value = value_bits;
  w.row = bits_for(dims.rows > 0 ? dims.rows - 1 : 0);
  w.col = bits_for(dims.cols > 0 ? dims.cols - 1 : 0);
  w.index = bits_for(dims.rows * dims.cols);
  w.period = bits_for(dims.rows);
  return w;
}

double storage_bits(MatrixDims dims, double rho, Format format, const BitWidths& widths,
                    std::optional<std::size_t> period) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("density must lie in [0, 1]");
  widths.validate();
  const double h = static_cast<double>(dims.rows);
  const double w = static_cast<double>(dims.cols);
  const double nnz = rho * h * w;
  switch (format) {
    case Format::Dense:
      return h * w * widths.value;
    case Format::Coo:
      return nnz * (widths.value + widths.row + widths.col);
    case Format::Csr:
      return nnz * (widths.value + widths.col) + (h + 1) * widths.index;
    case Format::Csc:
      return nnz * (widths.value + widths.row) + (w + 1) * widths.index;
    case Format::CsrP: {
      const double p = static_cast<double>(require_period(format, period));
      return nnz * widths.value + rho * p * w * widths.col + (h + 1) * widths.index + widths.period;
    }
    case Format::CscP: {
      const double p = static_cast<double>(require_period(format, period));
      return nnz * widths.value + rho * p * h * widths.row + (w + 1) * widths.index + widths.period;
    }
  }
  return 0.0;
}

double storage_bits(const SparseMatrix& s, const BitWidths& widths) {
  widths.validate();
  const auto n = [](const auto& v) { return static_cast<double>(v.size()); };
  double bits = n(s.data) * widths.value + n(s.row) * widths.row + n(s.col) * widths.col +
                n(s.index) * widths.index;
  if (is_periodic(s.format)) bits += widths.period;
  return bits;
}

double aux_overhead_bits(MatrixDims dims, double rho, Format format, const BitWidths& widths,
                         std::optional<std::size_t> period) {
  if (format == Format::Dense) return 0.0;
  const double payload = rho * static_cast<double>(dims.rows) * static_cast<double>(dims.cols) * widths.value;
  return storage_bits(dims, rho, format, widths, period) - payload;
}

double overhead_reduction(double reference_overhead_bits, double candidate_overhead_bits) {
  if (reference_overhead_bits <= 0.0) throw InvalidArgument("reference overhead must be positive");
  return 1.0 - candidate_overhead_bits / reference_overhead_bits;
}

Crossover crossover_density(MatrixDims dims, Format format, const BitWidths& widths,
                            std::optional<std::size_t> period) {
  if (format == Format::Dense) throw InvalidArgument("crossover is undefined for the dense format");
  const double dense = storage_bits(dims, 0.0, Format::Dense, widths);
  const double at0 = storage_bits(dims, 0.0, format, widths, period);
  const double slope = storage_bits(dims, 1.0, format, widths, period) - at0;
  if (slope <= 0.0) return Crossover{at0 <= dense ? 1.0 : 0.0, at0 <= dense};
  const double root = (dense - at0) / slope;
  if (root > 1.0) return Crossover{1.0, false};
  return Crossover{std::max(root, 0.0), root >= 0.0};
}

double rlc_bits(MatrixDims dims, double rho, int value_bits, int run_bits) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("density must lie in [0, 1]");
  return rho * static_cast<double>(dims.rows * dims.cols) * (value_bits + run_bits);
}

double rlc_bits(const FlattenedWeightMatrix& m, int value_bits, int run_bits) {
  if (run_bits < 1 || run_bits > 32) throw InvalidArgument("run field width must lie in [1, 32]");
  const std::size_t max_run = (std::size_t{1} << run_bits) - 1;
  std::size_t entries = 0;
  std::size_t run = 0;
  for (float v : m.values) {
    if (v == 0.0f) {
      if (++run > max_run) {
        ++entries;  // explicit zero value closes a saturated run
        run = 0;
      }
    } else {
      ++entries;
      run = 0;
    }
  }
  return static_cast<double>(entries) * (value_bits + run_bits);
}

}  // namespace psconv
