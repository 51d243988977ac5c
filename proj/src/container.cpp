#include "psconv/container.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "psconv/bit_stream.hpp"

namespace psconv {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'S', 'C', 'V'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteCursor {
 public:
  explicit ByteCursor(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint64_t get_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
  }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatCorruption("container truncated at byte " + std::to_string(pos_));
  }

  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  const std::uint8_t* here() const { return bytes_.data() + pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void pack(std::vector<std::uint8_t>& out, const std::vector<std::uint32_t>& v, int bits, const char* name) {
  const std::uint64_t limit = bits >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  BitWriter w(out);
  for (std::uint32_t x : v) {
    if (x > limit) {
      throw InvalidArgument(std::string(name) + " entry " + std::to_string(x) + " does not fit in " +
                            std::to_string(bits) + " bits");
    }
    w.write(x, bits);
  }
  w.align();
}

std::vector<std::uint32_t> unpack(ByteCursor& cur, std::size_t count, int bits) {
  const std::size_t bytes = (count * static_cast<std::size_t>(bits) + 7) / 8;
  cur.need(bytes);
  BitReader r(cur.here(), bytes);
  std::vector<std::uint32_t> v(count);
  for (auto& x : v) x = static_cast<std::uint32_t>(r.read(bits));
  cur.skip(bytes);
  return v;
}

std::uint32_t max_of(const std::vector<std::uint32_t>& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

BitWidths fitted_widths(const SparseMatrix& s, int value_bits) {
  BitWidths w;
  w.value = value_bits;
  w.row = bits_for(max_of(s.row));
  w.col = bits_for(max_of(s.col));
  w.index = bits_for(max_of(s.index));
  w.period = bits_for(s.period);
  return w;
}

std::vector<std::uint8_t> write_container(const SparseMatrix& s, const BitWidths& widths) {
  widths.validate();
  for (int b : {widths.value, widths.row, widths.col, widths.index, widths.period})
    if (b > 32) throw InvalidArgument("container widths are limited to 32 bits");

  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_le(out, kContainerVersion, 2);
  put_le(out, static_cast<std::uint8_t>(s.format), 1);
  put_le(out, s.rows, 4);
  put_le(out, s.cols, 4);
  put_le(out, s.period, 4);
  for (int b : {widths.value, widths.row, widths.col, widths.index, widths.period}) put_le(out, static_cast<std::uint64_t>(b), 1);
  for (std::size_t n : {s.data.size(), s.row.size(), s.col.size(), s.index.size()}) put_le(out, n, 4);
  for (float v : s.data) put_le(out, std::bit_cast<std::uint32_t>(v), 4);
  pack(out, s.row, widths.row, "row");
  pack(out, s.col, widths.col, "col");
  pack(out, s.index, widths.index, "index");
  return out;
}

StoredMatrix read_container(const std::vector<std::uint8_t>& bytes) {
  ByteCursor cur(bytes);
  cur.need(kMagic.size());
  if (!std::equal(kMagic.begin(), kMagic.end(), cur.here())) throw FormatCorruption("bad magic, not a PSCV container");
  cur.skip(kMagic.size());
  const auto version = cur.get_le(2);
  if (version != kContainerVersion) throw FormatCorruption("unsupported container version " + std::to_string(version));
  const auto tag = cur.get_le(1);
  if (tag > static_cast<std::uint64_t>(Format::CscP)) throw FormatCorruption("unknown format tag " + std::to_string(tag));

  StoredMatrix st;
  SparseMatrix& s = st.matrix;
  s.format = static_cast<Format>(tag);
  s.rows = static_cast<std::uint32_t>(cur.get_le(4));
  s.cols = static_cast<std::uint32_t>(cur.get_le(4));
  s.period = static_cast<std::uint32_t>(cur.get_le(4));
  st.widths.value = static_cast<int>(cur.get_le(1));
  st.widths.row = static_cast<int>(cur.get_le(1));
  st.widths.col = static_cast<int>(cur.get_le(1));
  st.widths.index = static_cast<int>(cur.get_le(1));
  st.widths.period = static_cast<int>(cur.get_le(1));
  try {
    st.widths.validate();
  } catch (const InvalidArgument& e) {
    throw FormatCorruption(e.what());
  }
  for (int b : {st.widths.row, st.widths.col, st.widths.index}) {
    if (b > 32) throw FormatCorruption("auxiliary width " + std::to_string(b) + " exceeds 32 bits");
  }
  std::array<std::size_t, 4> n{};
  for (auto& x : n) x = cur.get_le(4);

  cur.need(n[0] * 4);
  s.data.resize(n[0]);
  for (auto& v : s.data) v = std::bit_cast<float>(static_cast<std::uint32_t>(cur.get_le(4)));
  s.row = unpack(cur, n[1], st.widths.row);
  s.col = unpack(cur, n[2], st.widths.col);
  s.index = unpack(cur, n[3], st.widths.index);
  if (cur.remaining() != 0) throw FormatCorruption("trailing bytes after container payload");
  decode(s);  // structural validation
  return st;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::string container_json(const StoredMatrix& stored) {
  const SparseMatrix& s = stored.matrix;
  nlohmann::ordered_json j;
  j["format"] = std::string(format_name(s.format));
  j["rows"] = s.rows;
  j["cols"] = s.cols;
  j["period"] = s.period;
  j["widths"] = {{"b_v", stored.widths.value}, {"b_r", stored.widths.row}, {"b_c", stored.widths.col},
                 {"b_i", stored.widths.index}, {"b_P", stored.widths.period}};
  j["data"] = s.data;
  j["row"] = s.row;
  j["col"] = s.col;
  j["index"] = s.index;
  return j.dump(2) + "\n";
}

StoredMatrix container_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    StoredMatrix st;
    SparseMatrix& s = st.matrix;
    s.format = parse_format(j.at("format").get<std::string>());
    s.rows = j.at("rows").get<std::uint32_t>();
    s.cols = j.at("cols").get<std::uint32_t>();
    s.period = j.at("period").get<std::uint32_t>();
    const auto& w = j.at("widths");
    st.widths = BitWidths{w.at("b_v").get<int>(), w.at("b_r").get<int>(), w.at("b_c").get<int>(),
                          w.at("b_i").get<int>(), w.at("b_P").get<int>()};
    s.data = j.at("data").get<std::vector<float>>();
    s.row = j.at("row").get<std::vector<std::uint32_t>>();
    s.col = j.at("col").get<std::vector<std::uint32_t>>();
    s.index = j.at("index").get<std::vector<std::uint32_t>>();
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw FormatCorruption(std::string("malformed container JSON: ") + e.what());
  }
}

}  // namespace psconv
