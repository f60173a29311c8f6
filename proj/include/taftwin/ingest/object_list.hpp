#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "taftwin/core/geo.hpp"
#include "taftwin/ingest/tracker.hpp"

namespace taftwin::ingest {

// 15 core columns followed by the extension columns.
inline constexpr const char* kObjectListHeader =
    "id,timestamp,class,lat,lon,x,y,z,yaw,yaw_rate,speed,v_rel,length,width,height,source,cameras";

struct ObjectRow {
  std::uint64_t id = 0;
  double timestamp = 0.0;
  ParticipantClass cls = ParticipantClass::unknown;
  double lat = 0.0;
  double lon = 0.0;
  Vec3 position{};
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double speed = 0.0;
  double v_rel = 0.0;  // speed relative to the observing sensor; cameras are stationary
  Dimensions dimensions{};
  Source source = Source::perception;
  std::size_t cameras = 1;  // cameras fused into this sample
};

// Kinematics by finite differences over the matched history. A sample's velocity uses the
// step that ends at it; the first sample borrows the step that leaves it.
inline std::vector<ObjectRow> track_rows(const Track& tr, const GeoAnchor& anchor) {
  std::vector<ObjectRow> rows;
  const auto& h = tr.history;
  for (std::size_t i = 0; i < h.size(); ++i) {
    ObjectRow r;
    r.id = tr.id;
    r.timestamp = h[i].t;
    r.cls = tr.cls;
    r.position = {h[i].x, h[i].y, 0.0};
    const GeoPoint g = local_to_geo(anchor, r.position);
    r.lat = g.lat;
    r.lon = g.lon;
    r.dimensions = default_dimensions(tr.cls);
    r.cameras = h[i].cameras;
    if (h.size() >= 2) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i == 0 ? 1 : i;
      const double dt = h[b].t - h[a].t;
      const double dx = h[b].x - h[a].x, dy = h[b].y - h[a].y;
      r.speed = std::hypot(dx, dy) / dt;
      r.yaw = r.speed > 0.0 ? normalize_yaw(std::atan2(dy, dx)) : (rows.empty() ? 0.0 : rows.back().yaw);
      if (!rows.empty() && i >= 2) r.yaw_rate = normalize_yaw(r.yaw - rows.back().yaw) / (h[i].t - h[i - 1].t);
    }
    r.v_rel = r.speed;
    rows.push_back(r);
  }
  return rows;
}

inline std::string format_row(const ObjectRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%llu,%.6f,%s,%.9f,%.9f,%.4f,%.4f,%.4f,%.6f,%.6f,%.4f,%.4f,%.3f,%.3f,%.3f,%s,%zu",
                static_cast<unsigned long long>(r.id), r.timestamp, std::string(to_string(r.cls)).c_str(), r.lat, r.lon,
                r.position.x, r.position.y, r.position.z, r.yaw, r.yaw_rate, r.speed, r.v_rel, r.dimensions.length,
                r.dimensions.width, r.dimensions.height, std::string(to_string(r.source)).c_str(), r.cameras);
  return buf;
}

// Rows ordered by timestamp, then id. Empty input yields the header alone.
inline void export_object_list(const std::vector<Track>& tracks, const GeoAnchor& anchor, std::ostream& out) {
  std::vector<ObjectRow> rows;
  for (const auto& tr : tracks) {
    auto r = track_rows(tr, anchor);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ObjectRow& a, const ObjectRow& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
  });
  out << kObjectListHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

}  // namespace taftwin::ingest
