#include "psconv/schedule_json.hpp"

#include <json.hpp>

namespace psconv {

std::string schedule_to_json(const PatternSchedule& s) {
  nlohmann::ordered_json j;
  j["k"] = s.k;
  j["kss"] = s.kss;
  j["kvs"] = s.kvs;
  j["period"] = s.period;
  j["eta"] = s.eta;
  j["seed"] = s.seed;
  auto variants = nlohmann::ordered_json::array();
  for (const auto& v : s.variants) {
    auto cells = nlohmann::ordered_json::array();
    for (const Cell& c : v.support()) cells.push_back({c.row, c.col});
    variants.push_back(std::move(cells));
  }
  j["variants"] = std::move(variants);
  return j.dump() + "\n";
}

PatternSchedule schedule_from_json(const std::string& text) {
  PatternSchedule s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.k = j.at("k").get<int>();
    s.kss = j.at("kss").get<int>();
    s.kvs = j.at("kvs").get<int>();
    s.period = j.at("period").get<int>();
    s.eta = j.at("eta").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& v : j.at("variants")) {
      std::vector<Cell> cells;
      for (const auto& c : v) cells.push_back(Cell{c.at(0).get<int>(), c.at(1).get<int>()});
      s.variants.emplace_back(s.k, std::move(cells));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed schedule JSON: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace psconv
