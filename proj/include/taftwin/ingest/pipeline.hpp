#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "taftwin/core/geo.hpp"
#include "taftwin/core/json_io.hpp"
#include "taftwin/ingest/fusion.hpp"
#include "taftwin/ingest/homography.hpp"
#include "taftwin/ingest/object_list.hpp"
#include "taftwin/ingest/tracker.hpp"

namespace taftwin::ingest {

// Pixel detection: base centre of the object's mask, already height-adjusted.
struct Detection {
  std::string camera_id;
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
  ParticipantClass cls = ParticipantClass::unknown;
};

inline void from_json(const json& j, PointPair& p) {
  p = {get_field<double>(j, "u"), get_field<double>(j, "v"), get_field<double>(j, "x"), get_field<double>(j, "y")};
}
inline void to_json(json& j, const PointPair& p) { j = json{{"u", p.u}, {"v", p.v}, {"x", p.x}, {"y", p.y}}; }

inline void from_json(const json& j, CalibrationSet& c) {
  c.camera_id = get_field<std::string>(j, "camera_id");
  c.pairs = get_field<std::vector<PointPair>>(j, "pairs");
}
inline void to_json(json& j, const CalibrationSet& c) { j = json{{"camera_id", c.camera_id}, {"pairs", c.pairs}}; }

// Accepts one camera object, an array of them, or {"cameras": [...]}.
inline std::map<std::string, CalibrationSet> parse_calibrations(const json& j) {
  std::vector<CalibrationSet> sets;
  if (j.is_array()) {
    sets = j.get<std::vector<CalibrationSet>>();
  } else if (j.is_object() && j.contains("cameras")) {
    sets = get_field<std::vector<CalibrationSet>>(j, "cameras");
  } else {
    sets.push_back(j.get<CalibrationSet>());
  }
  std::map<std::string, CalibrationSet> out;
  for (auto& s : sets) {
    validate_calibration(s);
    const std::string id = s.camera_id;
    if (!out.emplace(id, std::move(s)).second) throw ConfigError("camera '" + id + "' calibrated twice");
  }
  return out;
}

// JSON lines of {camera_id, t, u, v, class}; blank lines are skipped.
inline std::vector<Detection> read_detections(std::istream& in) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Detection d;
      d.camera_id = get_field<std::string>(j, "camera_id");
      d.t = get_field<double>(j, "t");
      d.u = get_field<double>(j, "u");
      d.v = get_field<double>(j, "v");
      const auto cls = parse_class(get_field<std::string>(j, "class"));
      if (!cls) throw ConfigError("unknown class '" + j["class"].get<std::string>() + "'");
      d.cls = *cls;
      out.push_back(std::move(d));
    } catch (const json::parse_error& e) {
      throw ConfigError("detections line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("detections line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

struct IngestParams {
  double fusion_radius = kDefaultFusionRadius;
  TrackerParams tracker;
  std::size_t nearest = kNearestPairs;
};

// Projects every detection, fuses per timestamp, and tracks across timestamps. Calibration
// world points are Mercator metres; everything downstream runs in the anchor's local frame.
inline std::vector<Track> run_ingest(const std::map<std::string, CalibrationSet>& calib,
                                     const std::vector<Detection>& detections, const GeoAnchor& anchor,
                                     const IngestParams& p = {}) {
  std::map<double, std::vector<WorldDetection>> frames;
  for (const auto& d : detections) {
    auto it = calib.find(d.camera_id);
    if (it == calib.end()) throw ConfigError("no calibration for camera '" + d.camera_id + "'");
    const auto [mx, my] = project_point(it->second, d.u, d.v, p.nearest);
    const Vec3 local = mercator_to_local(anchor, {mx, my});
    frames[d.t].push_back({d.camera_id, d.cls, local.x, local.y});
  }
  Tracker tracker(p.tracker);
  for (auto& [t, pts] : frames) tracker.step(merge_detections(std::move(pts), p.fusion_radius), t);
  return tracker.all_tracks();
}

}  // namespace taftwin::ingest
