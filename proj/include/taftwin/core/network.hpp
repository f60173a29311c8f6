#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taftwin/core/geo.hpp"
#include "taftwin/core/polyline.hpp"

namespace taftwin {

using LaneId = std::int64_t;
using JunctionId = std::int64_t;
using GroupId = std::string;

enum class LaneKind { road, tram, pedestrian, bicycle };

struct LaneGeometry {
  LaneId id = 0;
  std::vector<Vec3> centerline;
  double width = 3.5;
  std::vector<LaneId> successor_ids;
  LaneKind lane_kind = LaneKind::road;
};

struct LaneConnection {
  LaneId from_lane = 0;
  LaneId to_lane = 0;
  std::vector<Vec3> curve;  // may be empty: straight link from end of `from` to start of `to`
  std::optional<GroupId> signal_group;
};

struct Junction {
  JunctionId id = 0;
  std::vector<LaneConnection> connections;
};

struct SignalGroup {
  GroupId id;
  std::vector<GroupId> conflicts;
  bool vru = false;  // pedestrian or cyclist signal head
};

struct RoadNetwork {
  GeoAnchor anchor{};
  std::vector<LaneGeometry> lanes;
  std::vector<Junction> junctions;
  std::vector<SignalGroup> signal_groups;

  const LaneGeometry* find_lane(LaneId id) const {
    auto it = std::find_if(lanes.begin(), lanes.end(), [&](const LaneGeometry& l) { return l.id == id; });
    return it == lanes.end() ? nullptr : &*it;
  }
  const SignalGroup* find_group(const GroupId& id) const {
    auto it = std::find_if(signal_groups.begin(), signal_groups.end(),
                           [&](const SignalGroup& g) { return g.id == id; });
    return it == signal_groups.end() ? nullptr : &*it;
  }
};

struct Finding {
  std::string code;  // dangling_successor, zero_length_lane, ...
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  std::size_t count(const std::string& code) const {
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [&](const Finding& f) { return f.code == code; }));
  }
};

inline ValidationReport validate_network(const RoadNetwork& net) {
  ValidationReport report;
  auto add = [&](std::string code, std::string msg) {
    report.findings.push_back({std::move(code), std::move(msg)});
  };

  std::set<LaneId> lane_ids;
  for (const auto& lane : net.lanes) {
    const std::string name = "lane " + std::to_string(lane.id);
    if (!lane_ids.insert(lane.id).second) add("duplicate_lane", name + " defined more than once");
    if (lane.centerline.size() < 2) {
      add("zero_length_lane", name + " has fewer than two centerline points");
    } else {
      for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
        const Vec3 d = lane.centerline[i] - lane.centerline[i - 1];
        if (d.x == 0.0 && d.y == 0.0 && d.z == 0.0) {
          add("zero_length_lane", name + " has repeated centerline point at index " + std::to_string(i));
          break;
        }
      }
    }
    if (!(lane.width > 0.0)) add("invalid_width", name + " has non-positive width");
  }
  for (const auto& lane : net.lanes) {
    for (LaneId succ : lane.successor_ids) {
      if (!lane_ids.count(succ)) {
        add("dangling_successor",
            "lane " + std::to_string(lane.id) + " references missing successor " + std::to_string(succ));
      }
    }
  }

  std::set<GroupId> group_ids;
  for (const auto& g : net.signal_groups) {
    if (!group_ids.insert(g.id).second) add("duplicate_group", "signal group " + g.id + " defined more than once");
  }
  for (const auto& g : net.signal_groups) {
    for (const auto& c : g.conflicts) {
      if (c == g.id) {
        add("self_conflict", "signal group " + g.id + " conflicts with itself");
        continue;
      }
      const SignalGroup* other = net.find_group(c);
      if (!other) {
        add("unknown_group", "signal group " + g.id + " conflicts with missing group " + c);
      } else if (std::find(other->conflicts.begin(), other->conflicts.end(), g.id) == other->conflicts.end()) {
        add("asymmetric_conflict", "conflict " + g.id + " -> " + c + " is not mirrored");
      }
    }
  }

  std::set<JunctionId> junction_ids;
  for (const auto& j : net.junctions) {
    const std::string name = "junction " + std::to_string(j.id);
    if (!junction_ids.insert(j.id).second) add("duplicate_junction", name + " defined more than once");
    for (const auto& c : j.connections) {
      for (LaneId l : {c.from_lane, c.to_lane}) {
        if (!lane_ids.count(l)) {
          add("missing_connection_lane", name + " connection references missing lane " + std::to_string(l));
        }
      }
      if (c.signal_group && !group_ids.count(*c.signal_group)) {
        add("unknown_group", name + " connection references missing signal group " + *c.signal_group);
      }
    }
  }
  return report;
}

}  // namespace taftwin
