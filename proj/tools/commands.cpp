#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "psconv/analyzer.hpp"
#include "psconv/container.hpp"
#include "psconv/error.hpp"
#include "psconv/network.hpp"
#include "psconv/pesim.hpp"
#include "psconv/report_io.hpp"
#include "psconv/rng.hpp"
#include "psconv/schedule_json.hpp"
#include "psconv/storage_cost.hpp"
#include "psconv/verify.hpp"

namespace psconv::cli {

namespace {

using json = nlohmann::ordered_json;

struct Output {
  std::string path;
  std::string sha256;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
  std::uint64_t seed = 1;
  std::vector<Output> outputs;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("PSCONV_SEED");
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidArgument("PSCONV_SEED must be an unsigned integer, got '" + std::string(env) + "'");
  }
  return v;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 0xF];
  }
  return s;
}

// Writes to `path`, or to ctx.out when the path is empty.
void emit(Context& ctx, const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    ctx.out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path);
  ctx.outputs.push_back({path, sha256_hex(bytes)});
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_manifest(Context& ctx, const std::string& path, const std::string& command) {
  if (path.empty()) return;
  json j;
  j["command"] = command;
  j["args"] = ctx.args;
  j["seed"] = ctx.seed;
  j["tool_version"] = kToolVersion;
  auto& outs = j["outputs"] = json::array();
  for (const auto& o : ctx.outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  const std::string text = j.dump(2) + "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, next - pos);
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw InvalidArgument(std::string("bad ") + what + " list '" + text + "'");
    }
    vals.push_back(v);
    pos = next + 1;
  }
  return vals;
}

BitWidths parse_widths(const std::string& text) {
  const auto v = parse_int_list(text, "widths");
  if (v.size() != 5) throw InvalidArgument("widths take five values b_v,b_r,b_c,b_i,b_P, got '" + text + "'");
  BitWidths w{v[0], v[1], v[2], v[3], v[4]};
  w.validate();
  return w;
}

std::optional<MatrixDims> parse_tile(const std::string& text) {
  if (text == "none") return std::nullopt;
  const auto x = text.find('x');
  if (x == std::string::npos) throw InvalidArgument("tile must look like 32x12 or be 'none'");
  const auto v = parse_int_list(text.substr(0, x) + "," + text.substr(x + 1), "tile");
  if (v[0] < 1 || v[1] < 1) throw InvalidArgument("tile extents must be positive");
  return MatrixDims{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
}

// Shortest text that reads back to the same double; for human-facing lines.
std::string short_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string matrix_json(const FlattenedWeightMatrix& m) {
  json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["kernel_size"] = m.kernel_size;
  j["values"] = m.values;
  return j.dump() + "\n";
}

FlattenedWeightMatrix matrix_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    return FlattenedWeightMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                                 j.at("values").get<std::vector<float>>(), j.value("kernel_size", 0));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad matrix JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- gen-pattern

struct GenPatternArgs {
  int k = 3;
  int kss = 0;
  int kvs = 0;
  int period = 0;
  int eta = 0;
  std::string out;
  std::string manifest;
};

int gen_pattern(Context& ctx, const GenPatternArgs& a) {
  const PatternSchedule s = build_schedule(a.k, a.kss, a.kvs, a.period, a.eta, ctx.seed);
  emit(ctx, a.out, schedule_to_json(s));
  std::ostream& info = a.out.empty() ? ctx.err : ctx.out;
  info << "schedule k=" << s.k << " kss=" << s.kss << " kvs=" << s.kvs << " period=" << s.period
       << " eta=" << s.eta << " seed=" << s.seed << "\n";
  info << "weights per period: " << s.weights_per_period() << " of " << s.period * s.k * s.k << "\n";
  info << "coverage: " << (s.covers_all_cells() ? "all cells" : "partial") << "\n";
  write_manifest(ctx, a.manifest, "gen-pattern");
  return kExitOk;
}

// -------------------------------------------------------------- sweep-storage

struct SweepArgs {
  int rows = 32;
  int cols = 12;
  int bv = 8;
  int br = 4;
  int bc = 4;
  int bi = 7;
  int bp = 6;
  std::string formats = "dense,coo,csr,csc,csr_p";
  std::string pvalues = "8,16";
  double step = 0.01;
  std::string out;
  std::string manifest;
};

int sweep_storage(Context& ctx, const SweepArgs& a) {
  if (a.rows < 1 || a.cols < 1) throw InvalidArgument("rows and cols must be positive");
  if (!(a.step > 0.0 && a.step <= 1.0)) throw InvalidArgument("step must lie in (0, 1]");
  const BitWidths w{a.bv, a.br, a.bc, a.bi, a.bp};
  w.validate();
  const MatrixDims dims{static_cast<std::size_t>(a.rows), static_cast<std::size_t>(a.cols)};
  const auto periods = parse_int_list(a.pvalues, "period");
  for (int p : periods)
    if (p < 1) throw InvalidArgument("periods must be positive");

  struct Column {
    std::string name;
    Format format;
    std::optional<std::size_t> period;
  };
  std::vector<Column> columns;
  std::string list = a.formats;
  std::stringstream ss(list);
  for (std::string name; std::getline(ss, name, ',');) {
    const Format f = parse_format(name);
    if (is_periodic(f)) {
      for (int p : periods) columns.push_back({std::string(format_name(f)) + std::to_string(p), f, p});
    } else {
      columns.push_back({std::string(format_name(f)), f, std::nullopt});
    }
  }
  if (columns.empty()) throw InvalidArgument("no formats requested");

  std::string csv = "density";
  for (const auto& c : columns) csv += "," + c.name;
  csv += "\n";
  const auto steps = static_cast<long>(std::llround(1.0 / a.step));
  for (long i = 0; i <= steps; ++i) {
    const double rho = static_cast<double>(i) / static_cast<double>(steps);
    csv += format_real(rho);
    for (const auto& c : columns) csv += "," + format_real(storage_bits(dims, rho, c.format, w, c.period));
    csv += "\n";
  }
  csv += "\nformat,crossover_density,beats_dense_below\n";
  for (const auto& c : columns) {
    if (c.format == Format::Dense) continue;
    const Crossover x = crossover_density(dims, c.format, w, c.period);
    csv += c.name + "," + format_real(x.density) + "," + (x.crossed ? "1" : "0") + "\n";
  }
  emit(ctx, a.out, csv);
  write_manifest(ctx, a.manifest, "sweep-storage");
  return kExitOk;
}

// --------------------------------------------------------------------- report

struct PaperValue {
  const char* family;  // vgg16 or resnet18
  const char* config;  // sparsity label, "*" for any
  const char* quantity;
  double expected;
  int decimals;      // compare at printed precision when >= 0
  double tolerance;  // otherwise relative (rel) or absolute tolerance
  bool relative;
  const char* source;
};

// Published reference values. VGG16 reductions equal the layer-level closed
// form; the ResNet18 ones are network totals (shortcuts and first layer dense).
constexpr PaperValue kPaperValues[] = {
    {"vgg16", "*", "dense_params", 14.73e6, -1, 0.005, true, "Table IV, VGG16_pSC9 14.73 M"},
    {"resnet18", "*", "dense_params", 11.17e6, -1, 0.005, true, "Table IV, ResNet18_pSC9 11.17 M"},
    {"vgg16", "pSC4", "closed_form_reduction_pct", 55.56, 2, 0, false, "Table IV, VGG16_pSC4"},
    {"vgg16", "pSC2", "closed_form_reduction_pct", 77.78, 2, 0, false, "Table IV, VGG16_pSC2"},
    {"vgg16", "pSC1", "closed_form_reduction_pct", 88.89, 2, 0, false, "Table IV, VGG16_pSC1"},
    {"resnet18", "pSC4", "reduction_pct", 54.65, 2, 0, false, "Table IV, ResNet18_pSC4"},
    {"resnet18", "pSC2", "reduction_pct", 76.56, 2, 0, false, "Table IV, ResNet18_pSC2"},
    {"resnet18", "pSC1", "reduction_pct", 87.50, 2, 0, false, "Table IV, ResNet18_pSC1"},
    {"vgg16", "PS4_P4", "closed_form_reduction_pct", 55.56, 2, 0, false, "Table V, VGG16_PS4_P4"},
    {"vgg16", "PS2_P6", "closed_form_reduction_pct", 77.78, 2, 0, false, "Table V, VGG16_PS2_P6"},
    {"vgg16", "PS1_P9", "closed_form_reduction_pct", 88.89, 2, 0, false, "Table V, VGG16_PS1_P9"},
    {"resnet18", "PS4_P4", "reduction_pct", 54.65, 2, 0, false, "Table V, ResNet18_PS4_P4"},
    {"resnet18", "PS2_P6", "reduction_pct", 76.56, 2, 0, false, "Table V, ResNet18_PS2_P6"},
    {"resnet18", "PS1_P9", "reduction_pct", 87.50, 2, 0, false, "Table V, ResNet18_PS1_P9"},
    {"vgg16", "PSD4_P8", "closed_form_reduction_pct", 48.61, 2, 0, false, "Table VI, VGG16_PSD4_P8"},
    {"vgg16", "PSD4_P16", "closed_form_reduction_pct", 52.1, 1, 0, false, "Table VI, VGG16_PSD4_P16"},
    {"vgg16", "PSD2_P8", "closed_form_reduction_pct", 68.1, 1, 0, false, "Table VI, VGG16_PSD2_P8"},
    {"vgg16", "PSD2_P16", "closed_form_reduction_pct", 72.92, 2, 0, false, "Table VI, VGG16_PSD2_P16"},
    {"vgg16", "PSD1_P8", "closed_form_reduction_pct", 77.78, 2, 0, false, "Table VI, VGG16_PSD1_P8"},
    {"vgg16", "PSD1_P16", "closed_form_reduction_pct", 83.33, 2, 0, false, "Table VI, VGG16_PSD1_P16"},
    {"vgg16", "PSD4_P4", "closed_form_reduction_pct", 41.67, 2, 0, false, "Table VI, VGG16_PSD4_P4"},
    {"vgg16", "PSD2_P6", "closed_form_reduction_pct", 64.81, 2, 0, false, "Table VI, VGG16_PSD2_P6"},
    {"vgg16", "PSD1_P9", "closed_form_reduction_pct", 79, 0, 0, false, "Table VI, VGG16_PSD1_P9"},
    {"resnet18", "PSD4_P8", "reduction_pct", 47.83, 2, 0, false, "Table VI, ResNet18_PSD4_P8"},
    {"resnet18", "PSD4_P16", "reduction_pct", 51.26, 2, 0, false, "Table VI, ResNet18_PSD4_P16"},
    {"resnet18", "PSD2_P8", "reduction_pct", 67, 0, 0, false, "Table VI, ResNet18_PSD2_P8"},
    {"resnet18", "PSD2_P16", "reduction_pct", 71.78, 2, 0, false, "Table VI, ResNet18_PSD2_P16"},
    {"resnet18", "PSD1_P8", "reduction_pct", 76.56, 2, 0, false, "Table VI, ResNet18_PSD1_P8"},
    {"resnet18", "PSD1_P16", "reduction_pct", 82.02, 2, 0, false, "Table VI, ResNet18_PSD1_P16"},
    {"resnet18", "PSD4_P4", "reduction_pct", 41, 0, 0, false, "Table VI, ResNet18_PSD4_P4"},
    {"resnet18", "PSD2_P6", "reduction_pct", 63.8, 1, 0, false, "Table VI, ResNet18_PSD2_P6"},
    {"resnet18", "PSD1_P9", "reduction_pct", 77.77, 2, 0, false, "Table VI, ResNet18_PSD1_P9"},
    {"vgg16", "PSD1_P8", "sparse_flops", 0.073e9, -1, 0.05, true, "Sec. V-E, VGG16_PSD1_P8 0.073 G FLOPs"},
    {"vgg16", "PSD4_P8", "normalized_csr_p", 0.66, -1, 0.05, false, "Table X row 1"},
    {"vgg16", "PSD4_P8", "normalized_csr", 0.85, -1, 0.05, false, "Table X row 1"},
    {"vgg16", "PSD4_P16", "normalized_csr_p", 0.69, -1, 0.05, false, "Table X row 2"},
    {"vgg16", "PSD4_P16", "normalized_csr", 0.81, -1, 0.05, false, "Table X row 2"},
    {"vgg16", "PSD1_P8", "normalized_csr_p", 0.34, -1, 0.05, false, "Table X row 3"},
    {"vgg16", "PSD1_P8", "normalized_csr", 0.42, -1, 0.05, false, "Table X row 3"},
    {"vgg16", "PSD1_P16", "normalized_csr_p", 0.30, -1, 0.05, false, "Table X row 4"},
    {"vgg16", "PSD1_P16", "normalized_csr", 0.35, -1, 0.05, false, "Table X row 4"},
};

struct CheckOutcome {
  std::size_t checked = 0;
  std::size_t failed = 0;
};

double paper_quantity(const std::string& q, const NetworkSpec& net, const SparsityConfig& s, const CostReport& r) {
  if (q == "dense_params") return static_cast<double>(r.dense_params);
  if (q == "reduction_pct") return r.reduction_pct;
  if (q == "closed_form_reduction_pct") return r.closed_form_reduction_pct;
  if (q == "sparse_flops") return static_cast<double>(r.sparse_flops);
  StorageOptions opts;
  opts.format = q == "normalized_csr_p" ? Format::CsrP : Format::Csr;
  return network_storage(net, s, opts).normalized_storage;
}

CheckOutcome check_paper(std::ostream& log, const std::string& net_name, const NetworkSpec& net,
                         const SparsityConfig& s, const CostReport& r) {
  CheckOutcome res;
  std::string family;
  if (net.alpha == 1.0) {
    if (net_name.rfind("vgg16", 0) == 0) family = "vgg16";
    if (net_name.rfind("resnet18", 0) == 0) family = "resnet18";
  }
  const std::string label = s.label();
  for (const auto& pv : kPaperValues) {
    if (family != pv.family) continue;
    if (std::string(pv.config) != "*" && pv.config != label) continue;
    // FLOPs depend on the input resolution; the printed value is for CIFAR.
    if (std::string(pv.quantity) == "sparse_flops" && net_name != "vgg16-cifar") continue;
    const double got = paper_quantity(pv.quantity, net, s, r);
    bool ok;
    std::string shown;
    if (pv.decimals >= 0) {
      ok = std::abs(round_to(got, pv.decimals) - pv.expected) < 1e-9;
      shown = short_real(round_to(got, pv.decimals));
    } else {
      const double allowed = pv.relative ? pv.tolerance * std::abs(pv.expected) : pv.tolerance;
      ok = std::abs(got - pv.expected) <= allowed;
      shown = short_real(got);
    }
    ++res.checked;
    if (!ok) ++res.failed;
    log << (ok ? "PASS " : "FAIL ") << pv.quantity << " got " << shown << " expected " << short_real(pv.expected)
        << " (paper " << pv.source << ")\n";
  }
  if (res.checked == 0) log << "no paper values recorded for " << net_name << " " << label << "\n";
  return res;
}

struct ReportArgs {
  std::string net;
  int kss = 9;
  int period = 0;
  int eta = 0;
  std::string format;
  std::string widths;
  std::string tile = "32x12";
  int value_bits = 8;
  int period_bits = 6;
  bool csv = false;
  bool check = false;
  std::string out;
  std::string manifest;
};

int report(Context& ctx, const ReportArgs& a) {
  const NetworkSpec net = builtin_network(a.net);
  const SparsityConfig s{a.kss, a.period, a.eta};
  CostReport r;
  if (a.format.empty()) {
    r = param_count(net, s);
  } else {
    StorageOptions opts;
    opts.format = parse_format(a.format);
    opts.tile = parse_tile(a.tile);
    if (!a.widths.empty()) opts.widths = parse_widths(a.widths);
    opts.value_bits = a.value_bits;
    opts.period_bits = a.period_bits;
    r = network_storage(net, s, opts);
  }
  emit(ctx, a.out, a.csv ? report_csv(r) : report_json(r));
  std::ostream& info = a.out.empty() ? ctx.err : ctx.out;
  info << net.name << " " << s.label() << ": dense " << r.dense_params << ", sparse " << r.sparse_params
       << " conv params, reduction " << short_real(round_to(r.reduction_pct, 2)) << "%";
  if (!net.stage_widths.empty()) {
    info << ", widths [";
    for (std::size_t i = 0; i < net.stage_widths.size(); ++i) info << (i ? "," : "") << net.stage_widths[i];
    info << "]";
  }
  info << "\n";
  write_manifest(ctx, a.manifest, "report");
  if (a.check) {
    const CheckOutcome c = check_paper(info, a.net, net, s, r);
    if (c.failed > 0) {
      info << c.failed << " of " << c.checked << " paper values outside tolerance\n";
      return kExitPaperBreach;
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------------- verify

struct VerifyArgs {
  int seeds = 200;
  std::string sizes = "5,8,12";
  bool inject_fault = false;
  bool verbose = false;
};

int verify(Context& ctx, const VerifyArgs& a) {
  if (a.seeds < 1) throw InvalidArgument("at least one seed required");
  const auto sizes = parse_int_list(a.sizes, "size");
  const auto sum = run_verify(static_cast<std::size_t>(a.seeds), ctx.seed, sizes,
                              a.inject_fault ? Fault::StoreMaskedWeight : Fault::None);
  double worst = 0.0;
  for (const auto& r : sum.results) {
    worst = std::max(worst, r.max_rel_error);
    if (r.passed() && !a.verbose) continue;
    ctx.out << (r.passed() ? "pass " : "FAIL ") << describe(r.spec) << " rel_err=" << short_real(r.max_rel_error);
    if (!r.passed()) {
      ctx.out << " [";
      const std::pair<const char*, bool> props[] = {{"engine", r.engine_ok},       {"bitwise", r.bitwise_ok},
                                                    {"multiplies", r.multiplies_ok}, {"roundtrip", r.roundtrip_ok},
                                                    {"structural_zero", r.zero_invariance_ok},
                                                    {"stream", r.stream_ok}};
      bool first = true;
      for (const auto& [name, ok] : props) {
        if (ok) continue;
        ctx.out << (first ? "" : ",") << name;
        first = false;
      }
      ctx.out << "]";
    }
    ctx.out << "\n";
  }
  if (sum.failures == 0) {
    ctx.out << "all " << sum.results.size() << " cases pass (max relative error " << short_real(worst) << ")\n";
    return kExitOk;
  }
  ctx.out << sum.failures << " of " << sum.results.size() << " cases failed\n";
  return kExitRuntime;
}

// ------------------------------------------------------ encode/decode/dump/sim

struct EncodeArgs {
  std::string schedule;
  std::string matrix;
  int in_channels = 0;
  int out_channels = 0;
  std::string format;
  int period = 0;
  std::string widths;
  int value_bits = 8;
  std::string out;
  std::string manifest;
};

FlattenedWeightMatrix weights_from_schedule(const PatternSchedule& s, int in_channels, int out_channels,
                                            std::uint64_t seed, std::vector<std::string>& warnings) {
  if (in_channels < 1 || out_channels < 1) throw InvalidArgument("--in-channels and --out-channels are required");
  const LayerMask mask = expand_mask(s, static_cast<std::size_t>(in_channels), static_cast<std::size_t>(out_channels),
                                     &warnings);
  Tensor4D w(mask.shape());
  Xoshiro256 rng(seed);
  for (auto& v : w.data()) {
    v = static_cast<float>(rng.symmetric_unit());
    if (v == 0.0f) v = 0.5f;
  }
  return flatten(apply_mask(w, mask));
}

int encode_cmd(Context& ctx, const EncodeArgs& a) {
  if (a.schedule.empty() == a.matrix.empty()) throw InvalidArgument("give exactly one of --schedule or --matrix");
  const Format format = parse_format(a.format);
  FlattenedWeightMatrix m;
  std::uint32_t period = static_cast<std::uint32_t>(std::max(a.period, 0));
  std::vector<std::string> warnings;
  if (!a.schedule.empty()) {
    const PatternSchedule s = schedule_from_json(read_text(a.schedule));
    m = weights_from_schedule(s, a.in_channels, a.out_channels, ctx.seed, warnings);
    if (period == 0 && format == Format::CsrP) period = static_cast<std::uint32_t>(std::min<std::size_t>(s.period, m.rows));
    if (period == 0 && format == Format::CscP) {
      period = static_cast<std::uint32_t>(std::min<std::size_t>(static_cast<std::size_t>(s.period * s.k * s.k), m.cols));
    }
  } else {
    m = matrix_from_json(read_text(a.matrix));
  }
  for (const auto& w : warnings) ctx.err << "warning: " << w << "\n";
  const SparseMatrix s = encode(m, format, period);
  const BitWidths widths = a.widths.empty() ? fitted_widths(s, a.value_bits) : parse_widths(a.widths);
  const auto bytes = write_container(s, widths);
  emit(ctx, a.out, std::string(bytes.begin(), bytes.end()));
  ctx.err << format_name(format) << " " << m.rows << "x" << m.cols << " nnz=" << s.data.size()
          << " storage_bits=" << short_real(storage_bits(s, widths)) << "\n";
  write_manifest(ctx, a.manifest, "encode");
  return kExitOk;
}

StoredMatrix load_container(const std::string& path) {
  const auto bytes = read_file(path);
  return read_container(bytes);
}

int decode_cmd(Context& ctx, const std::string& in, const std::string& out, const std::string& manifest) {
  emit(ctx, out, matrix_json(decode(load_container(in).matrix)));
  write_manifest(ctx, manifest, "decode");
  return kExitOk;
}

int dump_cmd(Context& ctx, const std::string& in, const std::string& out) {
  emit(ctx, out, container_json(load_container(in)));
  return kExitOk;
}

struct SimulateArgs {
  std::string in;
  std::string matrix;
  bool example = false;
  std::string format = "csr_p";
  std::string strategy = "replicate_on_write";
  int period = 0;
  bool bundle = false;
  std::string widths;
  std::string trace;
  std::string out;
  std::string manifest;
};

int simulate_cmd(Context& ctx, const SimulateArgs& a) {
  const int sources = (a.in.empty() ? 0 : 1) + (a.matrix.empty() ? 0 : 1) + (a.example ? 1 : 0);
  if (sources != 1) throw InvalidArgument("give exactly one of --in, --matrix or --example");
  FlattenedWeightMatrix m;
  PeOptions opts;
  opts.period = static_cast<std::uint32_t>(std::max(a.period, 0));
  std::optional<BitWidths> widths;
  if (!a.in.empty()) {
    const StoredMatrix st = load_container(a.in);
    m = decode(st.matrix);
    widths = st.widths;
    if (opts.period == 0) opts.period = st.matrix.period;
  } else if (!a.matrix.empty()) {
    m = matrix_from_json(read_text(a.matrix));
  } else {
    m = example_pe_submatrix(ctx.seed);
    if (opts.period == 0) opts.period = 4;
  }
  const Format format = parse_format(a.format);
  if (is_periodic(format) && opts.period == 0) {
    opts.period = static_cast<std::uint32_t>(format == Format::CsrP ? detect_row_period(m) : detect_col_period(m));
  }
  if (!a.widths.empty()) widths = parse_widths(a.widths);
  if (!widths) widths = BitWidths::minimal_for({m.rows, m.cols}, 8);
  opts.widths = *widths;
  opts.strategy = parse_strategy(a.strategy);
  opts.bundle_pairs = a.bundle;
  const TrafficReport r = simulate_pe(m, format, opts);
  emit(ctx, a.out, traffic_json(r));
  if (!a.trace.empty()) emit(ctx, a.trace, traffic_trace_csv(r));
  write_manifest(ctx, a.manifest, "simulate");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, args, 1, {}};
  CLI::App app{"Periodic sparse convolution toolkit", "psconv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::optional<std::uint64_t> seed;
  auto add_seed = [&seed](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "PRNG seed (default: $PSCONV_SEED or 1)");
  };

  GenPatternArgs gp;
  auto* gen = app.add_subcommand("gen-pattern", "Draw a periodic kernel-pattern schedule");
  gen->add_option("--k", gp.k, "kernel side")->capture_default_str();
  gen->add_option("--kss", gp.kss, "cells per sparse kernel")->required();
  gen->add_option("--kvs", gp.kvs, "distinct sparse variants")->required();
  gen->add_option("--period", gp.period, "kernels per period")->required();
  gen->add_option("--eta", gp.eta, "FC kernels per period")->capture_default_str();
  gen->add_option("--out", gp.out, "schedule JSON path (default stdout)");
  gen->add_option("--manifest", gp.manifest, "write a run manifest");
  add_seed(gen);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep-storage", "Storage bits vs density for each format");
  sweep->add_option("--rows", sw.rows)->capture_default_str();
  sweep->add_option("--cols", sw.cols)->capture_default_str();
  sweep->add_option("--bv", sw.bv, "value bits")->capture_default_str();
  sweep->add_option("--br", sw.br, "row-index bits")->capture_default_str();
  sweep->add_option("--bc", sw.bc, "column-index bits")->capture_default_str();
  sweep->add_option("--bi", sw.bi, "index-vector bits")->capture_default_str();
  sweep->add_option("--bp", sw.bp, "period-field bits")->capture_default_str();
  sweep->add_option("--formats", sw.formats, "comma-separated formats")->capture_default_str();
  sweep->add_option("--pvalues", sw.pvalues, "periods for periodic formats")->capture_default_str();
  sweep->add_option("--step", sw.step, "density step")->capture_default_str();
  sweep->add_option("--out", sw.out, "CSV path (default stdout)");
  sweep->add_option("--manifest", sw.manifest, "write a run manifest");

  ReportArgs rp;
  auto* rep = app.add_subcommand("report", "Parameter, FLOP and storage report for a network");
  rep->add_option("--net", rp.net, "vgg16-cifar|vgg16-tiny|resnet18|resnet18-tiny|mobilenetv2[@alpha]")->required();
  rep->add_option("--kss", rp.kss)->capture_default_str();
  rep->add_option("--period", rp.period)->capture_default_str();
  rep->add_option("--eta", rp.eta)->capture_default_str();
  rep->add_option("--format", rp.format, "also price storage in this format");
  rep->add_option("--widths", rp.widths, "b_v,b_r,b_c,b_i,b_P (default: minimal per tile)");
  rep->add_option("--tile", rp.tile, "PE sub-matrix RxC or 'none'")->capture_default_str();
  rep->add_option("--value-bits", rp.value_bits)->capture_default_str();
  rep->add_option("--period-bits", rp.period_bits)->capture_default_str();
  rep->add_flag("--csv", rp.csv, "emit CSV instead of JSON");
  rep->add_flag("--check-paper", rp.check, "compare against the paper's printed values");
  rep->add_option("--out", rp.out, "report path (default stdout)");
  rep->add_option("--manifest", rp.manifest, "write a run manifest");

  VerifyArgs vf;
  auto* ver = app.add_subcommand("verify", "Engine, round-trip and scratchpad equivalence checks");
  ver->add_option("--seeds", vf.seeds, "number of random layers")->capture_default_str();
  ver->add_option("--sizes", vf.sizes, "input sizes to cycle through")->capture_default_str();
  ver->add_flag("--inject-fault", vf.inject_fault, "store one masked weight (negative control)");
  ver->add_flag("--verbose", vf.verbose, "print every case");
  add_seed(ver);

  EncodeArgs en;
  auto* enc = app.add_subcommand("encode", "Encode weights into a PSCV container");
  enc->add_option("--schedule", en.schedule, "schedule JSON; weights are drawn from the seed");
  enc->add_option("--matrix", en.matrix, "matrix JSON {rows, cols, values}");
  enc->add_option("--in-channels", en.in_channels);
  enc->add_option("--out-channels", en.out_channels);
  enc->add_option("--format", en.format)->required();
  enc->add_option("--period", en.period, "period (rows for csr_p, columns for csc_p)");
  enc->add_option("--widths", en.widths, "b_v,b_r,b_c,b_i,b_P (default: fitted)");
  enc->add_option("--value-bits", en.value_bits)->capture_default_str();
  enc->add_option("--out", en.out, "PSCV path")->required();
  enc->add_option("--manifest", en.manifest, "write a run manifest");
  add_seed(enc);

  std::string dec_in, dec_out, dec_manifest;
  auto* dec = app.add_subcommand("decode", "Decode a PSCV container to matrix JSON");
  dec->add_option("--in", dec_in)->required();
  dec->add_option("--out", dec_out, "matrix JSON path (default stdout)");
  dec->add_option("--manifest", dec_manifest, "write a run manifest");

  std::string dump_in, dump_out;
  auto* dmp = app.add_subcommand("dump", "Print every vector of a PSCV container as JSON");
  dmp->add_option("--in", dump_in)->required();
  dmp->add_option("--out", dump_out);

  SimulateArgs sm;
  auto* sim = app.add_subcommand("simulate", "DRAM and scratchpad traffic of one PE");
  sim->add_option("--in", sm.in, "PSCV container");
  sim->add_option("--matrix", sm.matrix, "matrix JSON");
  sim->add_flag("--example", sm.example, "16x12 slice of a period-4 layer");
  sim->add_option("--format", sm.format)->capture_default_str();
  sim->add_option("--strategy", sm.strategy, "replicate_on_write|circular_buffer")->capture_default_str();
  sim->add_option("--period", sm.period);
  sim->add_flag("--bundle", sm.bundle, "scratchpad holds (data, index) pairs");
  sim->add_option("--widths", sm.widths, "b_v,b_r,b_c,b_i,b_P");
  sim->add_option("--trace", sm.trace, "CSV trace path");
  sim->add_option("--out", sm.out, "report path (default stdout)");
  sim->add_option("--manifest", sm.manifest, "write a run manifest");
  add_seed(sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    ctx.seed = seed ? *seed : default_seed();
    if (gen->parsed()) return gen_pattern(ctx, gp);
    if (sweep->parsed()) return sweep_storage(ctx, sw);
    if (rep->parsed()) return report(ctx, rp);
    if (ver->parsed()) return verify(ctx, vf);
    if (enc->parsed()) return encode_cmd(ctx, en);
    if (dec->parsed()) return decode_cmd(ctx, dec_in, dec_out, dec_manifest);
    if (dmp->parsed()) return dump_cmd(ctx, dump_in, dump_out);
    if (sim->parsed()) return simulate_cmd(ctx, sm);
  } catch (const CoverageInfeasible& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedFormat& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotPeriodic& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace psconv::cli
