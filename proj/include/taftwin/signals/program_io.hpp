#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "taftwin/core/json_io.hpp"
#include "taftwin/signals/program.hpp"

namespace taftwin::signals {

// Program layout inside the network document's `signal_programs` array:
//   {"name", "cycle", "mode", "greens": {"G": [[start, end], ...]}, "min_green", "max_green",
//    "gap_time", "default_intergreen", "intergreen": [{"from", "to", "seconds"}],
//    "progressive": [{"first", "second", "island_distance", "walk_speed"}]}
inline void to_json(json& j, const SignalProgram& p) {
  json greens = json::object();
  for (const auto& [g, ivs] : p.greens) {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back({iv.start, iv.end});
    greens[g] = std::move(arr);
  }
  json ig = json::array();
  for (const auto& [key, v] : p.intergreen) ig.push_back({{"from", key.first}, {"to", key.second}, {"seconds", v}});
  json prog = json::array();
  for (const auto& pc : p.progressive) {
    prog.push_back({{"first", pc.first},
                    {"second", pc.second},
                    {"island_distance", pc.island_distance},
                    {"walk_speed", pc.walk_speed}});
  }
  j = json{{"name", p.name},
           {"cycle", p.cycle},
           {"mode", to_string(p.mode)},
           {"greens", std::move(greens)},
           {"min_green", p.min_green},
           {"max_green", p.max_green},
           {"gap_time", p.gap_time},
           {"default_intergreen", p.default_intergreen},
           {"intergreen", std::move(ig)},
           {"progressive", std::move(prog)}};
}

inline void from_json(const json& j, SignalProgram& p) {
  p.name = get_field_or<std::string>(j, "name", "");
  p.cycle = get_field<double>(j, "cycle");
  p.mode = parse_mode(get_field_or<std::string>(j, "mode", "fixed"));
  p.greens.clear();
  const json greens = get_field<json>(j, "greens");
  for (const auto& [g, arr] : greens.items()) {
    auto& ivs = p.greens[g];
    for (const auto& iv : arr) {
      if (!iv.is_array() || iv.size() != 2) throw ConfigError("green interval of " + g + " must be [start, end]");
      ivs.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    std::sort(ivs.begin(), ivs.end(), [](const GreenInterval& a, const GreenInterval& b) { return a.start < b.start; });
  }
  p.min_green = get_field_or<double>(j, "min_green", 5.0);
  p.max_green = get_field_or<double>(j, "max_green", 60.0);
  p.gap_time = get_field_or<double>(j, "gap_time", 3.0);
  p.default_intergreen = get_field_or<double>(j, "default_intergreen", 5.0);
  p.intergreen.clear();
  for (const auto& e : get_field_or<json>(j, "intergreen", json::array())) {
    p.intergreen[{get_field<std::string>(e, "from"), get_field<std::string>(e, "to")}] = get_field<double>(e, "seconds");
  }
  p.progressive.clear();
  for (const auto& e : get_field_or<json>(j, "progressive", json::array())) {
    p.progressive.push_back({get_field<std::string>(e, "first"), get_field<std::string>(e, "second"),
                             get_field<double>(e, "island_distance"), get_field_or<double>(e, "walk_speed", 1.2)});
  }
}

}  // namespace taftwin::signals
