#include "psconv/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "psconv/error.hpp"

namespace psconv {

namespace {

NetworkSpec vgg16(const std::string& name, int input_size, std::vector<HeadLayer> head) {
  // 0 marks a 2x2 max-pool.
  const std::vector<int> cfg{64, 64, 0, 128, 128, 0, 256, 256, 256, 0, 512, 512, 512, 0, 512, 512, 512, 0};
  NetworkSpec net;
  net.name = name;
  net.stage_widths = {64, 128, 256, 512};
  int size = input_size;
  int in = 3;
  int idx = 1;
  for (int c : cfg) {
    if (c == 0) {
      size /= 2;
      continue;
    }
    net.layers.push_back(NetLayer{"conv" + std::to_string(idx), 3, in, c, size, size,
                                  idx == 1 ? LayerRole::First : LayerRole::Body});
    in = c;
    ++idx;
  }
  net.head = std::move(head);
  return net;
}

NetworkSpec resnet18(const std::string& name, int input_size, int classes) {
  NetworkSpec net;
  net.name = name;
  net.stage_widths = {64, 128, 256, 512};
  int size = input_size;
  net.layers.push_back(NetLayer{"conv1", 3, 3, 64, size, size, LayerRole::First});
  int in = 64;
  for (int stage = 0; stage < 4; ++stage) {
    const int width = net.stage_widths[static_cast<std::size_t>(stage)];
    if (stage > 0) size /= 2;
    for (int block = 0; block < 2; ++block) {
      const std::string prefix = "layer" + std::to_string(stage + 1) + "." + std::to_string(block) + ".";
      net.layers.push_back(NetLayer{prefix + "conv1", 3, in, width, size, size, LayerRole::Body});
      net.layers.push_back(NetLayer{prefix + "conv2", 3, width, width, size, size, LayerRole::Body});
      if (in != width) {
        net.layers.push_back(NetLayer{prefix + "shortcut", 1, in, width, size, size, LayerRole::Shortcut});
      }
      in = width;
    }
  }
  net.head = {HeadLayer{"fc", 512, classes}};
  return net;
}

NetworkSpec by_base_name(const std::string& base) {
  if (base == "vgg16-cifar") return vgg16(base, 32, {HeadLayer{"fc", 512, 10}});
  if (base == "vgg16-tiny") {
    return vgg16(base, 64,
                 {HeadLayer{"fc1", 2048, 4096}, HeadLayer{"fc2", 4096, 4096}, HeadLayer{"fc3", 4096, 200}});
  }
  if (base == "resnet18") return resnet18(base, 32, 10);
  if (base == "resnet18-tiny") return resnet18(base, 64, 200);
  if (base == "mobilenetv2") {
    NetworkSpec net;
    net.name = base;
    net.stage_widths = {16, 24, 32, 64, 96, 160, 320};
    return net;
  }
  throw InvalidArgument("unknown architecture '" + base + "'");
}

std::string_view role_name(LayerRole r) {
  switch (r) {
    case LayerRole::First: return "first";
    case LayerRole::Body: return "body";
    case LayerRole::Shortcut: return "shortcut";
  }
  return "body";
}

LayerRole parse_role(const std::string& s) {
  if (s == "first") return LayerRole::First;
  if (s == "body") return LayerRole::Body;
  if (s == "shortcut") return LayerRole::Shortcut;
  throw InvalidArgument("unknown layer role '" + s + "'");
}

}  // namespace

void NetworkSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("width multiplier must lie in (0, 1]");
  std::vector<int> produced{input_channels};
  for (const auto& l : layers) {
    if (l.k < 1 || l.in_channels < 1 || l.out_channels < 1 || l.out_height < 1 || l.out_width < 1) {
      throw InvalidArgument("layer " + l.name + " has a non-positive extent");
    }
    if (std::find(produced.begin(), produced.end(), l.in_channels) == produced.end()) {
      throw InvalidArgument("layer " + l.name + " consumes " + std::to_string(l.in_channels) +
                            " channels that no earlier layer produces");
    }
    produced.push_back(l.out_channels);
  }
}

int scale_width(int width, double alpha) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(width) * alpha)));
}

NetworkSpec apply_width_multiplier(const NetworkSpec& net, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("width multiplier must lie in (0, 1]");
  NetworkSpec out = net;
  out.alpha = net.alpha * alpha;
  for (int& w : out.stage_widths) w = scale_width(w, alpha);
  for (auto& l : out.layers) {
    if (l.role != LayerRole::First) l.in_channels = scale_width(l.in_channels, alpha);
    l.out_channels = scale_width(l.out_channels, alpha);
  }
  if (!out.head.empty()) out.head.front().in_features = scale_width(out.head.front().in_features, alpha);
  return out;
}

NetworkSpec builtin_network(const std::string& name) {
  const auto at = name.find('@');
  NetworkSpec net = by_base_name(name.substr(0, at));
  if (at == std::string::npos) return net;
  double alpha = 0.0;
  const char* first = name.data() + at + 1;
  const char* last = name.data() + name.size();
  const auto res = std::from_chars(first, last, alpha);
  if (res.ec != std::errc() || res.ptr != last) throw InvalidArgument("bad width multiplier in '" + name + "'");
  NetworkSpec scaled = apply_width_multiplier(net, alpha);
  scaled.name = name;
  return scaled;
}

std::vector<std::string> builtin_network_names() {
  return {"vgg16-cifar", "vgg16-tiny", "resnet18", "resnet18-tiny", "mobilenetv2"};
}

std::string network_to_json(const NetworkSpec& net) {
  nlohmann::ordered_json j;
  j["name"] = net.name;
  j["input_channels"] = net.input_channels;
  j["alpha"] = net.alpha;
  j["stage_widths"] = net.stage_widths;
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : net.layers) {
    layers.push_back(nlohmann::ordered_json{{"name", l.name},
                                            {"k", l.k},
                                            {"c_in", l.in_channels},
                                            {"c_out", l.out_channels},
                                            {"h_out", l.out_height},
                                            {"w_out", l.out_width},
                                            {"role", std::string(role_name(l.role))}});
  }
  j["layers"] = std::move(layers);
  auto head = nlohmann::ordered_json::array();
  for (const auto& h : net.head) {
    head.push_back(nlohmann::ordered_json{{"name", h.name}, {"in", h.in_features}, {"out", h.out_features}});
  }
  j["head"] = std::move(head);
  return j.dump(2) + "\n";
}

NetworkSpec network_from_json(const std::string& text) {
  NetworkSpec net;
  try {
    const auto j = nlohmann::json::parse(text);
    net.name = j.at("name").get<std::string>();
    net.input_channels = j.value("input_channels", 3);
    net.alpha = j.value("alpha", 1.0);
    net.stage_widths = j.value("stage_widths", std::vector<int>{});
    for (const auto& l : j.at("layers")) {
      net.layers.push_back(NetLayer{l.at("name").get<std::string>(), l.at("k").get<int>(), l.at("c_in").get<int>(),
                                    l.at("c_out").get<int>(), l.at("h_out").get<int>(), l.at("w_out").get<int>(),
                                    parse_role(l.value("role", std::string("body")))});
    }
    if (j.contains("head")) {
      for (const auto& h : j.at("head")) {
        net.head.push_back(HeadLayer{h.at("name").get<std::string>(), h.at("in").get<int>(), h.at("out").get<int>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed network JSON: ") + e.what());
  }
  net.validate();
  return net;
}

}  // namespace psconv
