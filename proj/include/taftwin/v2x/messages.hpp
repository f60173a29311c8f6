#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taftwin/core/geo.hpp"
#include "taftwin/core/json_io.hpp"
#include "taftwin/signals/controller.hpp"

namespace taftwin::v2x {

// Simplified JSON analogue of a Cooperative Awareness Message.
struct CamMessage {
  ParticipantId station_id = 0;
  double timestamp = 0.0;
  double lat = 0.0;
  double lon = 0.0;
  double speed = 0.0;    // m/s
  double heading = 0.0;  // radians, CCW from east, same convention as yaw
  Dimensions dimensions{};
  friend bool operator==(const CamMessage&, const CamMessage&) = default;
};

inline void to_json(json& j, const CamMessage& m) {
  j = json{{"type", "CAM"},          {"station_id", m.station_id}, {"timestamp", m.timestamp},
           {"lat", m.lat},           {"lon", m.lon},               {"speed", m.speed},
           {"heading", m.heading},   {"dimensions", m.dimensions}};
}
inline void from_json(const json& j, CamMessage& m) {
  m.station_id = get_field<ParticipantId>(j, "station_id");
  m.timestamp = get_field<double>(j, "timestamp");
  m.lat = get_field<double>(j, "lat");
  m.lon = get_field<double>(j, "lon");
  m.speed = get_field<double>(j, "speed");
  m.heading = get_field<double>(j, "heading");
  m.dimensions = get_field<Dimensions>(j, "dimensions");
}

inline constexpr double kDefaultCamRateHz = 10.0;

// Rate-limited CAM generation per station. A call inside the current rate interval of its
// station is suppressed.
class CamEmitter {
 public:
  explicit CamEmitter(GeoAnchor anchor, double rate_hz = kDefaultCamRateHz) : anchor_(anchor), rate_hz_(rate_hz) {
    if (!(rate_hz > 0.0)) throw PreconditionError("CAM rate must be positive");
  }

  std::optional<CamMessage> emit(const ParticipantState& s) {
    const double interval = 1.0 / rate_hz_;
    auto it = last_.find(s.id);
    // Tolerance absorbs accumulated sim-clock rounding so a 20 Hz clock yields exactly 10 Hz.
    if (it != last_.end() && s.timestamp - it->second < interval - 1e-9) return std::nullopt;
    last_[s.id] = s.timestamp;
    const GeoPoint g = local_to_geo(anchor_, s.position);
    return CamMessage{s.id, s.timestamp, g.lat, g.lon, s.speed, s.yaw, s.dimensions};
  }

  void forget(ParticipantId id) { last_.erase(id); }
  double rate_hz() const { return rate_hz_; }

 private:
  GeoAnchor anchor_;
  double rate_hz_;
  std::map<ParticipantId, double> last_;
};

// One-shot conversion without rate limiting.
inline CamMessage emit_cam(const ParticipantState& s, const GeoAnchor& anchor) {
  const GeoPoint g = local_to_geo(anchor, s.position);
  return {s.id, s.timestamp, g.lat, g.lon, s.speed, s.yaw, s.dimensions};
}

struct SpatGroupState {
  std::string group;
  signals::LightState state = signals::LightState::red;
  double time_to_change = 0.0;  // infinity when no change is planned
  friend bool operator==(const SpatGroupState&, const SpatGroupState&) = default;
};

// Simplified Signal Phase and Timing message.
struct SpatMessage {
  std::string intersection_id;
  double timestamp = 0.0;
  std::vector<SpatGroupState> groups;
};

inline SpatMessage emit_spat(const signals::SignalController& c, double t, const std::string& intersection_id) {
  SpatMessage m{intersection_id, t, {}};
  for (std::size_t g = 0; g < c.groups().size(); ++g) m.groups.push_back({c.groups()[g], c.state(g, t), c.time_to_change(g, t)});
  return m;
}

inline void to_json(json& j, const SpatMessage& m) {
  json groups = json::array();
  for (const auto& g : m.groups) {
    json e{{"group", g.group}, {"state", std::string(signals::to_string(g.state))}};
    // JSON has no infinity; an absent time_to_change means no change is planned.
    if (std::isfinite(g.time_to_change)) e["time_to_change"] = g.time_to_change;
    groups.push_back(e);
  }
  j = json{{"type", "SPAT"}, {"intersection_id", m.intersection_id}, {"timestamp", m.timestamp}, {"groups", groups}};
}

}  // namespace taftwin::v2x
