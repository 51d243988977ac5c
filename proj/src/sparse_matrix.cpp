#include "psconv/sparse_matrix.hpp"

#include <algorithm>
#include <cctype>

namespace psconv {

namespace {

std::string num(std::size_t v) { return std::to_string(v); }

void corrupt(const std::string& what) { throw FormatCorruption("corrupt " + what); }

// Checks an offset vector of `segments + 1` entries against `total` values.
void check_index(const std::vector<std::uint32_t>& index, std::size_t segments, std::size_t total,
                 const char* fmt) {
  const std::string f(fmt);
  if (index.size() != segments + 1) {
    corrupt(f + ": index has " + num(index.size()) + " entries, expected " + num(segments + 1));
  }
  if (index.front() != 0) corrupt(f + ": index[0] = " + num(index.front()) + ", expected 0");
  for (std::size_t i = 0; i + 1 < index.size(); ++i)
    if (index[i + 1] < index[i]) corrupt(f + ": index decreases at " + num(i + 1));
  if (index.back() != total) {
    corrupt(f + ": index[last] = " + num(index.back()) + " but data holds " + num(total) + " values");
  }
}

// Compressed encoding along `major` lines (rows for CSR, columns for CSC).
// `minor_of` holds, per stored value, its position inside the line.
struct Compressed {
  std::vector<float> data;
  std::vector<std::uint32_t> minor;
  std::vector<std::uint32_t> index;
};

template <typename Get>
Compressed compress(std::size_t major, std::size_t minor, Get get) {
  Compressed c;
  c.index.reserve(major + 1);
  c.index.push_back(0);
  for (std::size_t a = 0; a < major; ++a) {
    for (std::size_t b = 0; b < minor; ++b) {
      const float v = get(a, b);
      if (v != 0.0f) {
        c.data.push_back(v);
        c.minor.push_back(static_cast<std::uint32_t>(b));
      }
    }
    c.index.push_back(static_cast<std::uint32_t>(c.data.size()));
  }
  return c;
}

void check_period(std::uint32_t period, std::size_t extent, const char* what) {
  if (period == 0) throw InvalidArgument(std::string("periodic format requires a period"));
  if (period > extent) {
    throw InvalidArgument("period " + num(period) + " exceeds the " + num(extent) + " " + what);
  }
}

// Scatters a compressed representation back into a dense matrix. For a
// periodic layout, line a takes its minor positions from line (a mod period).
template <typename Put>
void expand(const SparseMatrix& s, std::size_t major, std::size_t minor,
            const std::vector<std::uint32_t>& minor_vec, std::uint32_t period, const char* fmt, Put put) {
  const std::string f(fmt);
  check_index(s.index, major, s.data.size(), fmt);
  const std::size_t stored_lines = period == 0 ? major : period;
  if (period != 0 && (period > major)) corrupt(f + ": period " + num(period) + " exceeds extent");
  if (minor_vec.size() != s.index[stored_lines]) {
    corrupt(f + ": auxiliary vector has " + num(minor_vec.size()) + " entries, expected " +
            num(s.index[stored_lines]));
  }
  for (std::size_t a = 0; a < major; ++a) {
    const std::size_t src = period == 0 ? a : a % period;
    const std::size_t len = s.index[a + 1] - s.index[a];
    if (len != s.index[src + 1] - s.index[src]) {
      corrupt(f + ": line " + num(a) + " holds " + num(len) + " values but its period source holds " +
              num(s.index[src + 1] - s.index[src]));
    }
    for (std::size_t j = 0; j < len; ++j) {
      const std::uint32_t b = minor_vec[s.index[src] + j];
      if (b >= minor) corrupt(f + ": position " + num(b) + " out of range " + num(minor));
      if (j > 0 && b <= minor_vec[s.index[src] + j - 1]) {
        corrupt(f + ": positions not strictly increasing in line " + num(a));
      }
      put(a, b, s.data[s.index[a] + j]);
    }
  }
}

}  // namespace

std::string_view format_name(Format f) {
  switch (f) {
    case Format::Dense: return "dense";
    case Format::Coo: return "coo";
    case Format::Csr: return "csr";
    case Format::Csc: return "csc";
    case Format::CsrP: return "csr_p";
    case Format::CscP: return "csc_p";
  }
  return "unknown";
}

Format parse_format(std::string_view name) {
  std::string n;
  for (char ch : name) n.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  for (Format f : {Format::Dense, Format::Coo, Format::Csr, Format::Csc, Format::CsrP, Format::CscP})
    if (n == format_name(f)) return f;
  throw InvalidArgument("unknown storage format '" + std::string(name) + "'");
}

bool is_periodic(Format f) { return f == Format::CsrP || f == Format::CscP; }

SparseMatrix encode(const FlattenedWeightMatrix& m, Format format, std::uint32_t period) {
  SparseMatrix s;
  s.format = format;
  s.rows = static_cast<std::uint32_t>(m.rows);
  s.cols = static_cast<std::uint32_t>(m.cols);
  auto by_row = [&](std::size_t r, std::size_t c) { return m.at(r, c); };
  auto by_col = [&](std::size_t c, std::size_t r) { return m.at(r, c); };

  switch (format) {
    case Format::Dense:
      s.data = m.values;
      break;
    case Format::Coo: {
      Compressed c = compress(m.rows, m.cols, by_row);
      s.data = std::move(c.data);
      s.col = std::move(c.minor);
      for (std::size_t r = 0; r < m.rows; ++r)
        s.row.insert(s.row.end(), c.index[r + 1] - c.index[r], static_cast<std::uint32_t>(r));
      break;
    }
    case Format::Csr:
    case Format::CsrP: {
      if (format == Format::CsrP) {
        check_period(period, m.rows, "rows");
        for (std::size_t r = period; r < m.rows; ++r)
          if (!m.same_row_pattern(r, r % period)) {
            throw NotPeriodic("row " + num(r) + " does not repeat the pattern of row " +
                              num(r % period) + " (period " + num(period) + ")");
          }
        s.period = period;
      }
      Compressed c = compress(m.rows, m.cols, by_row);
      s.data = std::move(c.data);
      s.col = std::move(c.minor);
      s.index = std::move(c.index);
      if (format == Format::CsrP) s.col.resize(s.index[period]);
      break;
    }
    case Format::Csc:
    case Format::CscP: {
      if (format == Format::CscP) {
        check_period(period, m.cols, "columns");
        for (std::size_t c = period; c < m.cols; ++c)
          if (!m.same_col_pattern(c, c % period)) {
            throw NotPeriodic("column " + num(c) + " does not repeat the pattern of column " +
                              num(c % period) + " (period " + num(period) + ")");
          }
        s.period = period;
      }
      Compressed c = compress(m.cols, m.rows, by_col);
      s.data = std::move(c.data);
      s.row = std::move(c.minor);
      s.index = std::move(c.index);
      if (format == Format::CscP) s.row.resize(s.index[period]);
      break;
    }
  }
  return s;
}

FlattenedWeightMatrix decode(const SparseMatrix& s) {
  FlattenedWeightMatrix m(s.rows, s.cols, std::vector<float>(std::size_t{s.rows} * s.cols, 0.0f));
  auto put_rc = [&](std::size_t r, std::size_t c, float v) { m.at(r, c) = v; };
  auto put_cr = [&](std::size_t c, std::size_t r, float v) { m.at(r, c) = v; };

  switch (s.format) {
    case Format::Dense:
      if (s.data.size() != m.values.size()) {
        corrupt("dense: " + num(s.data.size()) + " values for " + num(m.values.size()) + " entries");
      }
      m.values = s.data;
      break;
    case Format::Coo: {
      if (s.row.size() != s.data.size() || s.col.size() != s.data.size()) {
        corrupt("coo: data/row/col lengths differ");
      }
      std::vector<bool> seen(m.values.size(), false);
      for (std::size_t i = 0; i < s.data.size(); ++i) {
        if (s.row[i] >= s.rows || s.col[i] >= s.cols) corrupt("coo: coordinate out of range at " + num(i));
        const std::size_t at = std::size_t{s.row[i]} * s.cols + s.col[i];
        if (seen[at]) corrupt("coo: duplicate coordinate at " + num(i));
        seen[at] = true;
        m.values[at] = s.data[i];
      }
      break;
    }
    case Format::Csr:
      if (s.col.size() != s.data.size()) corrupt("csr: col and data lengths differ");
      expand(s, s.rows, s.cols, s.col, 0, "csr", put_rc);
      break;
    case Format::Csc:
      if (s.row.size() != s.data.size()) corrupt("csc: row and data lengths differ");
      expand(s, s.cols, s.rows, s.row, 0, "csc", put_cr);
      break;
    case Format::CsrP:
      if (s.period == 0) corrupt("csr_p: missing period");
      expand(s, s.rows, s.cols, s.col, s.period, "csr_p", put_rc);
      break;
    case Format::CscP:
      if (s.period == 0) corrupt("csc_p: missing period");
      expand(s, s.cols, s.rows, s.row, s.period, "csc_p", put_cr);
      break;
  }
  return m;
}

}  // namespace psconv
