#pragma once

#include <string>
#include <vector>

namespace psconv {

enum class LayerRole { First, Body, Shortcut };

struct NetLayer {
  std::string name;
  int k = 3;
  int in_channels = 0;
  int out_channels = 0;
  int out_height = 0;
  int out_width = 0;
  LayerRole role = LayerRole::Body;
};

struct HeadLayer {
  std::string name;
  int in_features = 0;
  int out_features = 0;
};

/// Conv layers of a network plus its classifier head. Networks described only
/// by their channel widths have no layers.
struct NetworkSpec {
  std::string name;
  int input_channels = 3;
  double alpha = 1.0;
  std::vector<int> stage_widths;
  std::vector<NetLayer> layers;
  std::vector<HeadLayer> head;

  /// Throws InvalidArgument when consecutive layers do not chain.
  void validate() const;
};

/// Built-ins: "vgg16-cifar", "vgg16-tiny", "resnet18", "resnet18-tiny",
/// "mobilenetv2" (widths only). An "@alpha" suffix applies a width multiplier.
NetworkSpec builtin_network(const std::string& name);
std::vector<std::string> builtin_network_names();

/// Scales every channel width by alpha, rounding to nearest with a floor of 1.
/// Image input channels are left alone.
NetworkSpec apply_width_multiplier(const NetworkSpec& net, double alpha);

int scale_width(int width, double alpha);

std::string network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const std::string& text);

}  // namespace psconv
