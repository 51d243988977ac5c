#include "psconv/pesim.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "psconv/error.hpp"

namespace psconv {

namespace {

struct Scratchpad {
  std::vector<float> data;
  std::vector<std::uint32_t> positions;
  std::vector<std::uint32_t> second;  // COO column vector
  std::vector<std::uint32_t> index;
};

void add_event(TrafficReport& r, std::string op, std::string vec, std::uint64_t entries, int width) {
  if (entries == 0) return;
  r.trace.push_back({std::move(op), std::move(vec), entries, entries * static_cast<std::uint64_t>(width)});
}

bool row_major(Format f) { return f == Format::Csr || f == Format::CsrP; }

// Positions of every stored value, one per non-zero, with the periodic
// vector replicated line by line.
std::vector<std::uint32_t> replicate_positions(const SparseMatrix& s) {
  const bool by_row = row_major(s.format);
  const auto& stored = by_row ? s.col : s.row;
  if (!is_periodic(s.format)) return stored;
  const std::size_t lines = by_row ? s.rows : s.cols;
  std::vector<std::uint32_t> out;
  out.reserve(s.data.size());
  for (std::size_t l = 0; l < lines; ++l) {
    const std::size_t src = s.index[l % s.period];
    const std::size_t len = s.index[l + 1] - s.index[l];
    out.insert(out.end(), stored.begin() + static_cast<std::ptrdiff_t>(src),
               stored.begin() + static_cast<std::ptrdiff_t>(src + len));
  }
  return out;
}

}  // namespace

MatrixDims SubMatrixJob::dims() const {
  return {filter_count, kernel_count * static_cast<std::size_t>(source.kernel_size)};
}

FlattenedWeightMatrix extract_submatrix(const SubMatrixJob& job) {
  const auto& src = job.source;
  const int k = src.kernel_size;
  if (k < 1) throw InvalidArgument("source matrix has no kernel size");
  const std::size_t kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  const std::size_t kernels = src.cols / kk;
  if (job.filter_count == 0 || job.kernel_count == 0) throw InvalidArgument("empty sub-matrix selection");
  if (job.first_filter + job.filter_count > src.rows) {
    throw InvalidArgument("filters [" + std::to_string(job.first_filter) + ", " +
                          std::to_string(job.first_filter + job.filter_count) + ") exceed " +
                          std::to_string(src.rows));
  }
  if (job.first_kernel + job.kernel_count > kernels) {
    throw InvalidArgument("kernels [" + std::to_string(job.first_kernel) + ", " +
                          std::to_string(job.first_kernel + job.kernel_count) + ") exceed " +
                          std::to_string(kernels));
  }
  if (job.kernel_row < 0 || job.kernel_row >= k) {
    throw InvalidArgument("kernel row " + std::to_string(job.kernel_row) + " outside [0, " + std::to_string(k) + ")");
  }
  const MatrixDims d = job.dims();
  std::vector<float> values;
  values.reserve(d.rows * d.cols);
  for (std::size_t f = job.first_filter; f < job.first_filter + job.filter_count; ++f) {
    for (std::size_t c = job.first_kernel; c < job.first_kernel + job.kernel_count; ++c) {
      const std::size_t base = c * kk + static_cast<std::size_t>(job.kernel_row * k);
      for (int j = 0; j < k; ++j) values.push_back(src.at(f, base + static_cast<std::size_t>(j)));
    }
  }
  return FlattenedWeightMatrix(d.rows, d.cols, std::move(values), k);
}

std::size_t detect_row_period(const FlattenedWeightMatrix& m) {
  if (m.rows == 0 || m.cols == 0) throw InvalidArgument("empty matrix");
  for (std::size_t p = 1; p < m.rows; ++p) {
    bool ok = true;
    for (std::size_t r = p; r < m.rows && ok; ++r) ok = m.same_row_pattern(r, r % p);
    if (ok) return p;
  }
  return m.rows;
}

std::size_t detect_col_period(const FlattenedWeightMatrix& m) {
  if (m.rows == 0 || m.cols == 0) throw InvalidArgument("empty matrix");
  for (std::size_t p = 1; p < m.cols; ++p) {
    bool ok = true;
    for (std::size_t c = p; c < m.cols && ok; ++c) ok = m.same_col_pattern(c, c % p);
    if (ok) return p;
  }
  return m.cols;
}

std::string_view strategy_name(ScratchpadStrategy s) {
  return s == ScratchpadStrategy::CircularBuffer ? "circular_buffer" : "replicate_on_write";
}

ScratchpadStrategy parse_strategy(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "replicate_on_write" || n == "replicate") return ScratchpadStrategy::ReplicateOnWrite;
  if (n == "circular_buffer" || n == "circular") return ScratchpadStrategy::CircularBuffer;
  throw InvalidArgument("unknown scratchpad strategy '" + std::string(name) + "'");
}

TrafficReport simulate_pe(const FlattenedWeightMatrix& m, Format format, const PeOptions& opts) {
  opts.widths.validate();
  const bool periodic = is_periodic(format);
  const bool circular = opts.strategy == ScratchpadStrategy::CircularBuffer;
  if (circular && !periodic) {
    throw InvalidArgument("circular_buffer needs a periodic format, got " + std::string(format_name(format)));
  }
  if (circular && opts.bundle_pairs) throw InvalidArgument("bundled pairs need replicate_on_write");
  std::uint32_t period = 0;
  if (periodic) {
    if (opts.period == 0) throw InvalidArgument("periodic format needs a period");
    const std::size_t found = format == Format::CsrP ? detect_row_period(m) : detect_col_period(m);
    if (opts.period % found != 0) {
      throw NotPeriodic("detected period " + std::to_string(found) + " does not divide configured period " +
                        std::to_string(opts.period));
    }
    period = opts.period;
  }

  const SparseMatrix s = encode(m, format, period);
  const BitWidths& w = opts.widths;
  TrafficReport r;
  r.format = format;
  r.strategy = opts.strategy;
  r.period = period;
  r.bundle_pairs = opts.bundle_pairs;
  r.dram_bits = storage_bits(s, w);
  r.baseline_dram_bits = opts.baseline_dram_bits ? *opts.baseline_dram_bits : storage_bits(encode(m, Format::Csr), w);
  if (r.baseline_dram_bits <= 0.0) throw InvalidArgument("baseline DRAM bits must be positive");
  r.relative_energy = r.dram_bits / r.baseline_dram_bits;

  add_event(r, "dram_read", "data", s.data.size(), w.value);
  add_event(r, "dram_read", "row", s.row.size(), w.row);
  add_event(r, "dram_read", "col", s.col.size(), w.col);
  add_event(r, "dram_read", "index", s.index.size(), w.index);
  if (periodic) add_event(r, "dram_read", "period", 1, w.period);

  const int pos_bits = row_major(format) ? w.col : w.row;
  Scratchpad pad;
  pad.data = s.data;
  pad.index = s.index;
  if (format == Format::Coo) {
    pad.positions = s.row;
    pad.second = s.col;
  } else if (format != Format::Dense) {
    pad.positions = circular ? (row_major(format) ? s.col : s.row) : replicate_positions(s);
  }
  r.position_writes = pad.positions.size() + pad.second.size();
  if (opts.bundle_pairs && format != Format::Dense) {
    const int pair_bits = w.value + (format == Format::Coo ? w.row + w.col : pos_bits);
    add_event(r, "spad_write", "pairs", pad.data.size(), pair_bits);
  } else {
    add_event(r, "spad_write", "data", pad.data.size(), w.value);
    if (format == Format::Coo) {
      add_event(r, "spad_write", "row", pad.positions.size(), w.row);
      add_event(r, "spad_write", "col", pad.second.size(), w.col);
    } else {
      add_event(r, "spad_write", row_major(format) ? "col" : "row", pad.positions.size(), pos_bits);
    }
  }
  add_event(r, "spad_write", "index", pad.index.size(), w.index);
  for (const auto& e : r.trace) {
    if (e.op != "spad_write") continue;
    r.onchip_bits_written += e.bits;
    r.scratchpad_entries += e.entries;
  }

  // Deliver the weights to the multiply stage.
  r.stream.reserve(pad.data.size());
  if (format == Format::Dense) {
    for (std::uint32_t i = 0; i < s.rows; ++i)
      for (std::uint32_t j = 0; j < s.cols; ++j) r.stream.push_back({i, j, pad.data[i * s.cols + j]});
  } else if (format == Format::Coo) {
    for (std::size_t t = 0; t < pad.data.size(); ++t) r.stream.push_back({pad.positions[t], pad.second[t], pad.data[t]});
  } else {
    const bool by_row = row_major(format);
    const std::uint32_t lines = by_row ? s.rows : s.cols;
    std::size_t cursor = 0;  // wraps around the one-period buffer
    for (std::uint32_t l = 0; l < lines; ++l) {
      for (std::uint32_t t = pad.index[l]; t < pad.index[l + 1]; ++t) {
        std::uint32_t pos;
        if (circular) {
          pos = pad.positions[cursor++];
          if (cursor == pad.positions.size()) cursor = 0;
        } else {
          pos = pad.positions[t];
        }
        r.stream.push_back(by_row ? StreamEntry{l, pos, pad.data[t]} : StreamEntry{pos, l, pad.data[t]});
      }
    }
    if (circular) r.read_amplification = static_cast<double>(lines) / static_cast<double>(period);
  }
  add_event(r, "spad_read", "data", r.stream.size(), w.value);
  if (format != Format::Dense) {
    const auto reads = static_cast<std::uint64_t>(r.stream.size());
    add_event(r, "spad_read", format == Format::Coo ? "row" : (row_major(format) ? "col" : "row"), reads,
              format == Format::Coo ? w.row : pos_bits);
    if (format == Format::Coo) add_event(r, "spad_read", "col", reads, w.col);
  }
  return r;
}

std::string traffic_json(const TrafficReport& r) {
  nlohmann::ordered_json j;
  j["format"] = format_name(r.format);
  j["strategy"] = strategy_name(r.strategy);
  j["period"] = r.period;
  j["bundle_pairs"] = r.bundle_pairs;
  j["dram_bits"] = r.dram_bits;
  j["baseline_dram_bits"] = r.baseline_dram_bits;
  j["relative_energy"] = r.relative_energy;
  j["onchip_bits_written"] = r.onchip_bits_written;
  j["scratchpad_entries"] = r.scratchpad_entries;
  j["position_writes"] = r.position_writes;
  j["read_amplification"] = r.read_amplification;
  j["stream_length"] = r.stream.size();
  auto& trace = j["trace"] = nlohmann::ordered_json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"op", e.op}, {"vector", e.vector}, {"entries", e.entries}, {"bits", e.bits}});
  }
  return j.dump(2) + "\n";
}

std::string traffic_trace_csv(const TrafficReport& r) {
  std::ostringstream out;
  out << "op,vector,entries,bits\n";
  for (const auto& e : r.trace) out << e.op << ',' << e.vector << ',' << e.entries << ',' << e.bits << '\n';
  return out.str();
}

}  // namespace psconv

#include "psconv/patterns.hpp"
#include "psconv/rng.hpp"

namespace psconv {

FlattenedWeightMatrix example_pe_submatrix(std::uint64_t seed, int kss, int kernel_row) {
  constexpr int k = 3;
  constexpr int period = 4;
  const auto schedule = build_schedule(k, kss, period, period, 0, seed);
  const LayerMask mask = expand_mask(schedule, period, 16);
  Tensor4D weights(mask.shape());
  Xoshiro256 rng(seed);
  for (auto& v : weights.data()) {
    v = static_cast<float>(rng.symmetric_unit());
    if (v == 0.0f) v = 0.5f;
  }
  SubMatrixJob job{flatten(apply_mask(weights, mask)), 0, 16, 0, 4, kernel_row};
  return extract_submatrix(job);
}

}  // namespace psconv
