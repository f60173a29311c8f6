#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "taftwin/ingest/fusion.hpp"

namespace taftwin::ingest {

struct TrackSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::size_t cameras = 1;
  friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

struct Track {
  std::uint64_t id = 0;
  ParticipantClass cls = ParticipantClass::unknown;
  std::vector<TrackSample> history;  // matched positions only, time-ordered
  std::size_t missed = 0;            // consecutive frames without a match

  // Constant-velocity extrapolation from the last two matched samples.
  std::pair<double, double> predict(double t) const {
    const TrackSample& last = history.back();
    if (history.size() < 2) return {last.x, last.y};
    const TrackSample& prev = history[history.size() - 2];
    const double span = last.t - prev.t;
    if (!(span > 0.0)) return {last.x, last.y};
    const double k = (t - last.t) / span;
    return {last.x + (last.x - prev.x) * k, last.y + (last.y - prev.y) * k};
  }
};

struct TrackerParams {
  double gate = 2.0;           // metres between prediction and detection
  std::size_t max_missed = 5;  // frames a track may coast before closing
};

// Global-nearest-neighbour tracker. Ids increase monotonically and are never reused.
class Tracker {
 public:
  explicit Tracker(TrackerParams p = {}) : p_(p) {
    if (!(p.gate > 0.0)) throw PreconditionError("tracker gate must be positive");
  }

  // Associates one frame of fused points observed at time t.
  void step(const std::vector<FusedPoint>& points, double t) {
    if (last_t_ && !(t > *last_t_)) throw PreconditionError("tracker frames must advance in time");
    last_t_ = t;

    struct Candidate {
      double dist;
      std::size_t track;
      std::size_t point;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < live_.size(); ++i) {
      const auto [px, py] = live_[i].predict(t);
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (points[j].cls != live_[i].cls) continue;
        const double d = std::hypot(points[j].x - px, points[j].y - py);
        if (d <= p_.gate) cands.push_back({d, i, j});
      }
    }
    // Cheapest pairs first; ties resolve by track age then point order.
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.dist, a.track, a.point) < std::tie(b.dist, b.track, b.point);
    });
    std::vector<bool> track_used(live_.size(), false), point_used(points.size(), false);
    for (const auto& c : cands) {
      if (track_used[c.track] || point_used[c.point]) continue;
      track_used[c.track] = point_used[c.point] = true;
      live_[c.track].history.push_back({t, points[c.point].x, points[c.point].y, points[c.point].cameras});
      live_[c.track].missed = 0;
    }

    std::vector<Track> still_live;
    for (std::size_t i = 0; i < live_.size(); ++i) {
      if (!track_used[i] && ++live_[i].missed > p_.max_missed) {
        closed_.push_back(std::move(live_[i]));
      } else {
        still_live.push_back(std::move(live_[i]));
      }
    }
    live_ = std::move(still_live);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (point_used[j]) continue;
      Track tr;
      tr.id = next_id_++;
      tr.cls = points[j].cls;
      tr.history.push_back({t, points[j].x, points[j].y, points[j].cameras});
      live_.push_back(std::move(tr));
    }
  }

  const std::vector<Track>& live() const { return live_; }
  const std::vector<Track>& closed() const { return closed_; }

  // Every track ever opened, ordered by id.
  std::vector<Track> all_tracks() const {
    std::vector<Track> out = closed_;
    out.insert(out.end(), live_.begin(), live_.end());
    std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
    return out;
  }

 private:
  TrackerParams p_;
  std::vector<Track> live_;
  std::vector<Track> closed_;
  std::uint64_t next_id_ = 1;
  std::optional<double> last_t_;
};

}  // namespace taftwin::ingest
