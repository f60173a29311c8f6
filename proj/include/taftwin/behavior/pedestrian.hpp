#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "taftwin/core/polyline.hpp"

namespace taftwin::behavior {

struct StopPoint {
  std::size_t waypoint = 0;
  double dwell_s = 0.0;
};

struct PedestrianTrack {
  std::vector<Vec3> spline;  // waypoints, walked in order
  double walk_speed = 1.3;
  bool looped = false;
  std::vector<StopPoint> stop_points;
};

// Progress of one pedestrian along its track.
struct PedestrianCursor {
  double s = 0.0;
  double dwell_left = 0.0;
  std::size_t next_stop = 0;  // index into the station-sorted stop list, per lap
  bool finished = false;
};

struct PedestrianStep {
  Vec3 position{};
  double yaw = 0.0;
  PedestrianCursor cursor;
};

// Walks `dt` seconds along the track, pausing at stop points and wrapping looped tracks.
class PedestrianWalker {
 public:
  explicit PedestrianWalker(PedestrianTrack track) : track_(std::move(track)), path_(track_.spline) {
    if (track_.spline.size() < 2) throw PreconditionError("pedestrian track needs at least two waypoints");
    if (!(track_.walk_speed > 0.0)) throw PreconditionError("walk speed must be positive");
    for (const auto& sp : track_.stop_points) {
      if (sp.waypoint >= track_.spline.size()) throw PreconditionError("stop point index out of range");
      stops_.push_back({path_.station(sp.waypoint), sp.dwell_s});
    }
    std::stable_sort(stops_.begin(), stops_.end(), [](const Stop& a, const Stop& b) { return a.s < b.s; });
  }

  double length() const { return path_.length(); }
  const PedestrianTrack& track() const { return track_; }

  PedestrianStep step(PedestrianCursor c, double dt) const {
    double remaining = dt;
    const double len = path_.length();
    int guard = 0;
    while (remaining > 0.0 && !c.finished && ++guard < 10000) {
      if (c.dwell_left > 0.0) {
        const double used = std::min(c.dwell_left, remaining);
        c.dwell_left -= used;
        remaining -= used;
        continue;
      }
      // skip stops behind the cursor (entry mid-track)
      while (c.next_stop < stops_.size() && stops_[c.next_stop].s < c.s) ++c.next_stop;
      const double target = c.next_stop < stops_.size() ? stops_[c.next_stop].s : len;
      const double reach = (target - c.s) / track_.walk_speed;
      if (reach > remaining) {
        c.s += remaining * track_.walk_speed;
        remaining = 0.0;
        break;
      }
      c.s = target;
      remaining -= reach;
      if (c.next_stop < stops_.size() && stops_[c.next_stop].s == target) {
        c.dwell_left = stops_[c.next_stop].dwell;
        ++c.next_stop;
        continue;
      }
      if (track_.looped) {
        c.s = 0.0;
        c.next_stop = 0;
        // a stop at station 0 is served at the start of each lap
      } else {
        c.finished = true;
      }
    }
    const PathPose pose = path_.at(std::clamp(c.s, 0.0, len));
    return {pose.position, pose.yaw, c};
  }

 private:
  struct Stop {
    double s;
    double dwell;
  };
  PedestrianTrack track_;
  Polyline path_;
  std::vector<Stop> stops_;
};

inline PedestrianStep step_pedestrian(const PedestrianTrack& track, PedestrianCursor cursor, double dt) {
  return PedestrianWalker(track).step(cursor, dt);
}

}  // namespace taftwin::behavior
