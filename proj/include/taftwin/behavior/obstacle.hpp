#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "taftwin/behavior/driver.hpp"
#include "taftwin/core/route.hpp"

namespace taftwin::behavior {

struct ScanResult {
  ObstacleObservation observation;
  std::optional<ParticipantId> obstacle_id;  // empty when the obstacle is a stop line
  double arc_distance = 0.0;                 // centre-to-obstacle distance along the path
};

// Nearest participant whose footprint overlaps the ego corridor ahead, or red stop line,
// within the lookahead horizon. Participants are taken from the prior frame; `red_stop_lines`
// holds only the stop lines the ego currently has to respect.
inline std::optional<ScanResult> obstacle_scan(const ParticipantState& ego, double ego_s, const Polyline& path,
                                               std::span<const ParticipantState> others,
                                               std::span<const StopLine> red_stop_lines,
                                               const DriverTuning& tuning) {
  std::optional<ScanResult> best;
  const double half_len = ego.dimensions.length / 2.0;
  auto consider = [&](const ScanResult& r) {
    if (!best || r.observation.d_stop < best->observation.d_stop) best = r;
  };

  for (const auto& o : others) {
    if (o.id == ego.id) continue;
    const double rel_yaw = o.yaw - ego.yaw;
    const double along_half = std::abs(std::cos(rel_yaw)) * o.dimensions.length / 2.0 +
                              std::abs(std::sin(rel_yaw)) * o.dimensions.width / 2.0;
    const double across_half = std::abs(std::sin(rel_yaw)) * o.dimensions.length / 2.0 +
                               std::abs(std::cos(rel_yaw)) * o.dimensions.width / 2.0;
    const PathProjection pr = path.project(o.position, ego_s, ego_s + tuning.lookahead_m);
    const double arc = pr.s - ego_s;
    if (!(arc > 0.0) || arc > tuning.lookahead_m) continue;
    if (pr.distance > ego.dimensions.width / 2.0 + across_half) continue;
    ScanResult r;
    r.obstacle_id = o.id;
    r.arc_distance = arc;
    r.observation.d_stop = std::max(0.0, arc - tuning.d_margin - half_len - along_half);
    r.observation.v_obs = o.speed * std::cos(rel_yaw) - ego.speed;
    consider(r);
  }

  for (const auto& line : red_stop_lines) {
    const double arc = line.s - ego_s;
    if (arc - half_len < 0.0 || arc > tuning.lookahead_m) continue;
    ScanResult r;
    r.arc_distance = arc;
    // The front bumper stops at the line.
    r.observation.d_stop = arc - half_len;
    r.observation.v_obs = -ego.speed;
    consider(r);
  }
  return best;
}

}  // namespace taftwin::behavior
