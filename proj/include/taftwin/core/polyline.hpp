#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "taftwin/core/error.hpp"
#include "taftwin/core/types.hpp"

namespace taftwin {

struct PathPose {
  Vec3 position{};
  double yaw = 0.0;
};

struct PathProjection {
  double s = 0.0;        // arc position of the closest point
  double lateral = 0.0;  // signed offset, positive to the left of the direction of travel
  double distance = std::numeric_limits<double>::infinity();
};

// Arc-length parameterised polyline. Evaluation clamps s to [0, length()].
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec3> points) : points_(std::move(points)) { rebuild(); }

  const std::vector<Vec3>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return points_.size() < 2; }
  double station(std::size_t i) const { return cumulative_.at(i); }

  void append(const Polyline& other) {
    if (other.points_.empty()) return;
    auto first = other.points_.begin();
    if (!points_.empty() && distance_xy(points_.back(), *first) < 1e-9 &&
        std::abs(points_.back().z - first->z) < 1e-9) {
      ++first;
    }
    points_.insert(points_.end(), first, other.points_.end());
    rebuild();
  }

  PathPose at(double s) const {
    if (points_.size() < 2) throw PreconditionError("polyline needs at least two points");
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    seg = std::min(seg, points_.size() - 2);
    const Vec3& a = points_[seg];
    const Vec3& b = points_[seg + 1];
    const double len = cumulative_[seg + 1] - cumulative_[seg];
    const double u = len > 0.0 ? (s - cumulative_[seg]) / len : 0.0;
    return {a + (b - a) * u, normalize_yaw(std::atan2(b.y - a.y, b.x - a.x))};
  }

  // Closest point restricted to arc window [s_min, s_max].
  PathProjection project(const Vec3& p, double s_min = 0.0,
                         double s_max = std::numeric_limits<double>::infinity()) const {
    PathProjection best;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const double s0 = cumulative_[i];
      const double s1 = cumulative_[i + 1];
      if (s1 < s_min || s0 > s_max || s1 <= s0) continue;
      const Vec3& a = points_[i];
      const Vec3& b = points_[i + 1];
      const double dx = b.x - a.x;
      const double dy = b.y - a.y;
      const double len = s1 - s0;
      double u = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
      const double u_lo = std::max(0.0, (s_min - s0) / len);
      const double u_hi = std::min(1.0, (s_max - s0) / len);
      u = std::clamp(u, u_lo, u_hi);
      const double cx = a.x + dx * u;
      const double cy = a.y + dy * u;
      const double d = std::hypot(p.x - cx, p.y - cy);
      if (d < best.distance) {
        best.distance = d;
        best.s = s0 + u * len;
        // cross product sign: left of travel direction is positive
        best.lateral = (dx * (p.y - a.y) - dy * (p.x - a.x)) / len;
      }
    }
    return best;
  }

 private:
  void rebuild() {
    cumulative_.assign(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const Vec3 d = points_[i] - points_[i - 1];
      cumulative_[i] = cumulative_[i - 1] + std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    }
  }

  std::vector<Vec3> points_;
  std::vector<double> cumulative_;
};

}  // namespace taftwin
