#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "taftwin/core/json_io.hpp"
#include "taftwin/procgen/cross_section.hpp"
#include "taftwin/procgen/sampler.hpp"

namespace taftwin::procgen {

// A street segment laid out along a reference lane. `reference_offset` is the lateral
// position of that lane's centerline measured from the cross-section's left edge.
struct StreetSegment {
  std::string id;
  LaneId reference_lane = 0;
  double reference_offset = 0.0;
  std::vector<SegmentPart> parts;
};

// Sampled assets placed along one part of a segment, starting at arc position s_start.
struct AssetRun {
  std::string segment_id;
  std::size_t part_index = 0;
  double s_start = 0.0;
  std::vector<Placement> placements;
};

inline void to_json(json& j, const SegmentPart& p) {
  j = json{{"kind", to_string(p.kind)}, {"width", p.resolved_width()}, {"height_offset", p.height_offset}};
  if (p.lane_count) j["lane_count"] = *p.lane_count;
  if (p.lane_width) j["lane_width"] = *p.lane_width;
}
inline void from_json(const json& j, SegmentPart& p) {
  p.kind = parse_part_kind(get_field<std::string>(j, "kind"));
  p.width = get_field_or<double>(j, "width", 0.0);
  p.height_offset = get_field_or<double>(j, "height_offset", 0.0);
  if (j.contains("lane_count")) p.lane_count = get_field<int>(j, "lane_count");
  if (j.contains("lane_width")) p.lane_width = get_field<double>(j, "lane_width");
}

struct ResolvedAsset {
  std::string asset_id;
  std::string set_name;
  std::string segment_id;
  double s = 0.0;        // arc position of the asset centre on the reference lane
  double lateral = 0.0;  // signed offset from the reference centerline, left positive
  Vec3 position{};
  double yaw = 0.0;
};

inline ResolvedAsset resolve_placement(const RoadNetwork& net, const StreetSegment& seg, const CrossSection& cs,
                                       const AssetRun& run, const Placement& p) {
  const LaneGeometry* lane = net.find_lane(seg.reference_lane);
  if (!lane) throw PreconditionError("segment " + seg.id + " references missing lane");
  if (run.part_index >= cs.parts.size()) throw PreconditionError("asset run part index out of range");
  const PartInterval& part = cs.parts[run.part_index];
  const Polyline path(lane->centerline);
  ResolvedAsset a;
  a.asset_id = p.asset_id;
  a.set_name = p.set_name;
  a.segment_id = seg.id;
  a.s = run.s_start + p.lateral_start + p.width / 2.0;
  a.lateral = seg.reference_offset - part.center();
  const PathPose pose = path.at(a.s);
  a.position = {pose.position.x - std::sin(pose.yaw) * a.lateral, pose.position.y + std::cos(pose.yaw) * a.lateral,
                pose.position.z + part.part.height_offset};
  a.yaw = pose.yaw;
  return a;
}

// Deterministic scene description: identical inputs give byte-identical text.
inline json build_scene(const RoadNetwork& net, const std::vector<StreetSegment>& segments,
                        const std::vector<AssetRun>& runs) {
  json scene;
  scene["anchor"] = net.anchor;
  json lanes = json::array();
  for (const auto& l : net.lanes) {
    json jl = l;
    jl["length"] = Polyline(l.centerline).length();
    lanes.push_back(std::move(jl));
  }
  scene["lanes"] = std::move(lanes);

  json sections = json::array();
  std::map<std::string, std::pair<const StreetSegment*, CrossSection>> built;
  for (const auto& seg : segments) {
    CrossSection cs = build_cross_section(seg.parts);
    json parts = json::array();
    for (const auto& iv : cs.parts) {
      json jp = iv.part;
      jp["start"] = iv.start;
      jp["end"] = iv.end;
      parts.push_back(std::move(jp));
    }
    sections.push_back(json{{"segment_id", seg.id},
                            {"reference_lane", seg.reference_lane},
                            {"reference_offset", seg.reference_offset},
                            {"total_width", cs.total_width},
                            {"parts", std::move(parts)}});
    built.emplace(seg.id, std::make_pair(&seg, std::move(cs)));
  }
  scene["cross_sections"] = std::move(sections);

  json assets = json::array();
  for (const auto& run : runs) {
    auto it = built.find(run.segment_id);
    if (it == built.end()) throw PreconditionError("asset run references unknown segment " + run.segment_id);
    for (const auto& p : run.placements) {
      const ResolvedAsset a = resolve_placement(net, *it->second.first, it->second.second, run, p);
      assets.push_back(json{{"asset_id", a.asset_id},
                            {"set", a.set_name},
                            {"segment_id", a.segment_id},
                            {"part_index", run.part_index},
                            {"s", a.s},
                            {"lateral", a.lateral},
                            {"width", p.width},
                            {"position", a.position},
                            {"yaw", a.yaw}});
    }
  }
  scene["assets"] = std::move(assets);
  return scene;
}

inline std::string export_scene(const RoadNetwork& net, const std::vector<StreetSegment>& segments,
                                const std::vector<AssetRun>& runs) {
  return build_scene(net, segments, runs).dump(2) + "\n";
}

}  // namespace taftwin::procgen
