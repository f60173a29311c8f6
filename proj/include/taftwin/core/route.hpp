#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "taftwin/core/network.hpp"

namespace taftwin {

struct StopLine {
  double s = 0.0;
  GroupId group;
};

// A drivable path through the network: concatenated lane centerlines and junction
// connection curves, with the signalised stop lines along it.
struct Route {
  LaneId start_lane = 0;
  std::vector<LaneId> lanes;
  Polyline path;
  std::vector<StopLine> stop_lines;
};

namespace detail {

inline void extend_routes(const RoadNetwork& net, Route current, std::size_t depth, std::vector<Route>& out) {
  const LaneId last = current.lanes.back();
  struct Link {
    LaneId to;
    const LaneConnection* via;
  };
  std::vector<Link> links;
  if (const LaneGeometry* lane = net.find_lane(last)) {
    for (LaneId succ : lane->successor_ids) links.push_back({succ, nullptr});
  }
  for (const auto& j : net.junctions) {
    for (const auto& c : j.connections) {
      if (c.from_lane == last) links.push_back({c.to_lane, &c});
    }
  }
  bool extended = false;
  if (depth < 16) {
    for (const Link& link : links) {
      if (std::find(current.lanes.begin(), current.lanes.end(), link.to) != current.lanes.end()) continue;
      const LaneGeometry* next = net.find_lane(link.to);
      if (!next || next->centerline.size() < 2) continue;
      Route r = current;
      if (link.via && link.via->signal_group) r.stop_lines.push_back({r.path.length(), *link.via->signal_group});
      if (link.via && link.via->curve.size() >= 2) r.path.append(Polyline(link.via->curve));
      std::vector<Vec3> bridge{r.path.points().back(), next->centerline.front()};
      if (distance_xy(bridge[0], bridge[1]) > 1e-9) r.path.append(Polyline(bridge));
      r.path.append(Polyline(next->centerline));
      r.lanes.push_back(link.to);
      extend_routes(net, std::move(r), depth + 1, out);
      extended = true;
    }
  }
  if (!extended) out.push_back(std::move(current));
}

}  // namespace detail

// Every maximal lane sequence reachable from `start_lane`, in deterministic order.
inline std::vector<Route> enumerate_routes(const RoadNetwork& net, LaneId start_lane) {
  const LaneGeometry* lane = net.find_lane(start_lane);
  if (!lane || lane->centerline.size() < 2) throw PreconditionError("unknown or degenerate start lane");
  Route r;
  r.start_lane = start_lane;
  r.lanes = {start_lane};
  r.path = Polyline(lane->centerline);
  std::vector<Route> out;
  detail::extend_routes(net, std::move(r), 0, out);
  return out;
}

}  // namespace taftwin
