#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "taftwin/core/types.hpp"

namespace taftwin::ingest {

// A detection after projection, in local ENU metres.
struct WorldDetection {
  std::string camera_id;
  ParticipantClass cls = ParticipantClass::unknown;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const WorldDetection&, const WorldDetection&) = default;
};

struct FusedPoint {
  ParticipantClass cls = ParticipantClass::unknown;
  double x = 0.0;
  double y = 0.0;
  std::size_t cameras = 1;  // distinct cameras that contributed
  friend bool operator==(const FusedPoint&, const FusedPoint&) = default;
};

inline constexpr double kDefaultFusionRadius = 1.5;

namespace detail {

inline auto detection_key(const WorldDetection& d) { return std::tie(d.cls, d.camera_id, d.x, d.y); }

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

// Single-linkage grouping of same-class points closer than `radius`. Each group becomes the
// centroid of its per-camera means. The result does not depend on input order.
inline std::vector<FusedPoint> merge_detections(std::vector<WorldDetection> points,
                                                double radius = kDefaultFusionRadius) {
  if (!(radius > 0.0)) throw PreconditionError("fusion radius must be positive");
  // A canonical order makes every floating-point sum below order-independent.
  std::sort(points.begin(), points.end(),
            [](const WorldDetection& a, const WorldDetection& b) { return detail::detection_key(a) < detail::detection_key(b); });
  const std::size_t n = points.size();
  detail::DisjointSet ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[i].cls == points[j].cls && std::hypot(points[i].x - points[j].x, points[i].y - points[j].y) <= radius) {
        ds.unite(i, j);
      }
    }
  }
  std::map<std::size_t, std::map<std::string, std::vector<std::size_t>>> groups;  // root -> camera -> members
  for (std::size_t i = 0; i < n; ++i) groups[ds.find(i)][points[i].camera_id].push_back(i);

  std::vector<FusedPoint> out;
  for (const auto& [root, cams] : groups) {
    double sx = 0.0, sy = 0.0;
    for (const auto& [cam, members] : cams) {
      double cx = 0.0, cy = 0.0;
      for (std::size_t i : members) {
        cx += points[i].x;
        cy += points[i].y;
      }
      sx += cx / static_cast<double>(members.size());
      sy += cy / static_cast<double>(members.size());
    }
    const double m = static_cast<double>(cams.size());
    out.push_back({points[root].cls, sx / m, sy / m, cams.size()});
  }
  std::sort(out.begin(), out.end(), [](const FusedPoint& a, const FusedPoint& b) {
    return std::tie(a.cls, a.x, a.y, a.cameras) < std::tie(b.cls, b.x, b.y, b.cameras);
  });
  return out;
}

}  // namespace taftwin::ingest
