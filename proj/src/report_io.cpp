#include "psconv/report_io.hpp"

#include <array>
#include <charconv>

#include <json.hpp>

namespace psconv {

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string report_json(const CostReport& r) {
  nlohmann::ordered_json j;
  j["network"] = r.network;
  j["alpha"] = r.alpha;
  j["sparsity"] = {{"label", r.sparsity.label()},
                   {"kss", r.sparsity.kss},
                   {"period", r.sparsity.period},
                   {"eta", r.sparsity.eta}};
  j["stage_widths"] = r.stage_widths;
  j["dense_params"] = r.dense_params;
  j["sparse_params"] = r.sparse_params;
  j["head_params"] = r.head_params;
  j["dense_flops"] = r.dense_flops;
  j["sparse_flops"] = r.sparse_flops;
  j["reduction_pct"] = round_to(r.reduction_pct, 2);
  j["closed_form_reduction_pct"] = round_to(r.closed_form_reduction_pct, 2);
  j["flop_reduction_pct"] = round_to(r.flop_reduction_pct, 2);
  if (r.storage) {
    const auto& s = *r.storage;
    nlohmann::ordered_json st;
    st["format"] = format_name(s.format);
    if (s.tile) st["tile"] = {s.tile->rows, s.tile->cols};
    else st["tile"] = nullptr;
    st["widths"] = {{"value", r.widths_used.value},
                    {"row", r.widths_used.row},
                    {"col", r.widths_used.col},
                    {"index", r.widths_used.index},
                    {"period", r.widths_used.period}};
    st["widths_minimal"] = !s.widths.has_value();
    st["storage_bits"] = r.storage_bits;
    st["dense_bits"] = r.dense_bits;
    st["normalized_storage"] = r.normalized_storage;
    j["storage"] = st;
  }
  auto& layers = j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : r.layers) {
    nlohmann::ordered_json e;
    e["name"] = l.name;
    e["k"] = l.k;
    e["in_channels"] = l.in_channels;
    e["out_channels"] = l.out_channels;
    e["out_hw"] = {l.out_height, l.out_width};
    e["sparse"] = l.sparse;
    e["dense_params"] = l.dense_params;
    e["sparse_params"] = l.sparse_params;
    e["dense_flops"] = l.dense_flops;
    e["sparse_flops"] = l.sparse_flops;
    if (r.storage) e["storage_bits"] = l.storage_bits;
    layers.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const CostReport& r) {
  std::string out =
      "layer,k,in_channels,out_channels,out_height,out_width,sparse,dense_params,sparse_params,dense_flops,"
      "sparse_flops,storage_bits,dense_bits\n";
  auto row = [&out](const std::string& name, const std::string& shape, bool sparse, std::uint64_t dp,
                    std::uint64_t sp, std::uint64_t df, std::uint64_t sf, double sb, double db) {
    out += name + "," + shape + "," + (sparse ? "1" : "0") + "," + std::to_string(dp) + "," + std::to_string(sp) +
           "," + std::to_string(df) + "," + std::to_string(sf) + "," + format_real(sb) + "," + format_real(db) + "\n";
  };
  for (const auto& l : r.layers) {
    const std::string shape = std::to_string(l.k) + "," + std::to_string(l.in_channels) + "," +
                              std::to_string(l.out_channels) + "," + std::to_string(l.out_height) + "," +
                              std::to_string(l.out_width);
    row(l.name, shape, l.sparse, l.dense_params, l.sparse_params, l.dense_flops, l.sparse_flops, l.storage_bits,
        l.dense_bits);
  }
  row("total", ",,,,", false, r.dense_params, r.sparse_params, r.dense_flops, r.sparse_flops, r.storage_bits,
      r.dense_bits);
  return out;
}

}  // namespace psconv
