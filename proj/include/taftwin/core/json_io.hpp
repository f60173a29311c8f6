#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "taftwin/core/network.hpp"
#include "taftwin/core/types.hpp"

namespace taftwin {

using json = nlohmann::json;

// Field access that reports the missing/mistyped key instead of a bare type_error.
template <class T>
T get_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline void to_json(json& j, const Vec3& v) { j = json{{"x", v.x}, {"y", v.y}, {"z", v.z}}; }
inline void from_json(const json& j, Vec3& v) {
  if (j.is_array()) {
    if (j.size() < 2 || j.size() > 3) throw ConfigError("point arrays need 2 or 3 coordinates");
    v = {j[0].get<double>(), j[1].get<double>(), j.size() == 3 ? j[2].get<double>() : 0.0};
    return;
  }
  v = {get_field<double>(j, "x"), get_field<double>(j, "y"), get_field_or<double>(j, "z", 0.0)};
}

inline void to_json(json& j, const Dimensions& d) {
  j = json{{"length", d.length}, {"width", d.width}, {"height", d.height}};
}
inline void from_json(const json& j, Dimensions& d) {
  d = {get_field<double>(j, "length"), get_field<double>(j, "width"), get_field<double>(j, "height")};
}

inline void to_json(json& j, const ParticipantState& s) {
  j = json{{"id", s.id},
           {"timestamp", s.timestamp},
           {"class", to_string(s.cls)},
           {"position", s.position},
           {"yaw", s.yaw},
           {"yaw_rate", s.yaw_rate},
           {"speed", s.speed},
           {"dimensions", s.dimensions},
           {"source", to_string(s.source)}};
}
inline void from_json(const json& j, ParticipantState& s) {
  s.id = get_field<ParticipantId>(j, "id");
  s.timestamp = get_field<double>(j, "timestamp");
  const auto cls = parse_class(get_field<std::string>(j, "class"));
  if (!cls) throw ConfigError("unknown participant class");
  s.cls = *cls;
  s.position = get_field<Vec3>(j, "position");
  s.yaw = get_field<double>(j, "yaw");
  s.yaw_rate = get_field_or<double>(j, "yaw_rate", 0.0);
  s.speed = get_field<double>(j, "speed");
  s.dimensions = j.contains("dimensions") ? get_field<Dimensions>(j, "dimensions") : default_dimensions(s.cls);
  const auto src = parse_source(get_field_or<std::string>(j, "source", "external_client"));
  if (!src) throw ConfigError("unknown participant source");
  s.source = *src;
}

inline void to_json(json& j, const GeoAnchor& a) {
  j = json{{"origin_lat", a.origin_lat}, {"origin_lon", a.origin_lon}, {"origin_alt", a.origin_alt}};
}
inline void from_json(const json& j, GeoAnchor& a) {
  a = {get_field<double>(j, "origin_lat"), get_field<double>(j, "origin_lon"),
       get_field_or<double>(j, "origin_alt", 0.0)};
}

inline std::string_view to_string(LaneKind k) {
  switch (k) {
    case LaneKind::road: return "road";
    case LaneKind::tram: return "tram";
    case LaneKind::pedestrian: return "pedestrian";
    case LaneKind::bicycle: return "bicycle";
  }
  return "road";
}

inline LaneKind parse_lane_kind(const std::string& s) {
  if (s == "road") return LaneKind::road;
  if (s == "tram") return LaneKind::tram;
  if (s == "pedestrian") return LaneKind::pedestrian;
  if (s == "bicycle") return LaneKind::bicycle;
  throw ConfigError("unknown lane kind '" + s + "'");
}

inline void to_json(json& j, const LaneGeometry& l) {
  j = json{{"id", l.id},
           {"centerline", l.centerline},
           {"width", l.width},
           {"successor_ids", l.successor_ids},
           {"lane_kind", to_string(l.lane_kind)}};
}
inline void from_json(const json& j, LaneGeometry& l) {
  l.id = get_field<LaneId>(j, "id");
  l.centerline = get_field<std::vector<Vec3>>(j, "centerline");
  l.width = get_field<double>(j, "width");
  l.successor_ids = get_field_or<std::vector<LaneId>>(j, "successor_ids", {});
  l.lane_kind = parse_lane_kind(get_field_or<std::string>(j, "lane_kind", "road"));
}

inline void to_json(json& j, const LaneConnection& c) {
  j = json{{"from_lane", c.from_lane}, {"to_lane", c.to_lane}, {"curve", c.curve}};
  if (c.signal_group) j["signal_group"] = *c.signal_group;
}
inline void from_json(const json& j, LaneConnection& c) {
  c.from_lane = get_field<LaneId>(j, "from_lane");
  c.to_lane = get_field<LaneId>(j, "to_lane");
  c.curve = get_field_or<std::vector<Vec3>>(j, "curve", {});
  if (j.contains("signal_group") && !j["signal_group"].is_null()) c.signal_group = get_field<std::string>(j, "signal_group");
}

inline void to_json(json& j, const Junction& jn) { j = json{{"id", jn.id}, {"connections", jn.connections}}; }
inline void from_json(const json& j, Junction& jn) {
  jn.id = get_field<JunctionId>(j, "id");
  jn.connections = get_field_or<std::vector<LaneConnection>>(j, "connections", {});
}

inline void to_json(json& j, const SignalGroup& g) {
  j = json{{"id", g.id}, {"conflicts", g.conflicts}, {"vru", g.vru}};
}
inline void from_json(const json& j, SignalGroup& g) {
  g.id = get_field<std::string>(j, "id");
  g.conflicts = get_field_or<std::vector<std::string>>(j, "conflicts", {});
  g.vru = get_field_or<bool>(j, "vru", false);
}

inline void to_json(json& j, const RoadNetwork& n) {
  j = json{{"anchor", n.anchor}, {"lanes", n.lanes}, {"junctions", n.junctions}, {"signal_groups", n.signal_groups}};
}
inline void from_json(const json& j, RoadNetwork& n) {
  n.anchor = get_field<GeoAnchor>(j, "anchor");
  n.lanes = get_field<std::vector<LaneGeometry>>(j, "lanes");
  n.junctions = get_field_or<std::vector<Junction>>(j, "junctions", {});
  n.signal_groups = get_field_or<std::vector<SignalGroup>>(j, "signal_groups", {});
}

}  // namespace taftwin
