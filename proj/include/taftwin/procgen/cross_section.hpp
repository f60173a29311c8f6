#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taftwin/core/error.hpp"

namespace taftwin::procgen {

enum class PartKind { road, vegetation, pedestrian, marking };

inline std::string_view to_string(PartKind k) {
  switch (k) {
    case PartKind::road: return "road";
    case PartKind::vegetation: return "vegetation";
    case PartKind::pedestrian: return "pedestrian";
    case PartKind::marking: return "marking";
  }
  return "road";
}

inline PartKind parse_part_kind(std::string_view s) {
  if (s == "road") return PartKind::road;
  if (s == "vegetation") return PartKind::vegetation;
  if (s == "pedestrian") return PartKind::pedestrian;
  if (s == "marking") return PartKind::marking;
  throw ConfigError("unknown segment part kind '" + std::string(s) + "'");
}

class InvalidPart : public Error {
 public:
  using Error::Error;
};

// One strip of a street cross-section. Road parts may be given by lane count and lane
// width instead of an explicit width.
struct SegmentPart {
  PartKind kind = PartKind::road;
  double width = 0.0;
  double height_offset = 0.0;
  std::optional<int> lane_count;
  std::optional<double> lane_width;

  double resolved_width() const {
    if (kind == PartKind::road && lane_count && lane_width) return *lane_count * *lane_width;
    return width;
  }
};

struct PartInterval {
  SegmentPart part;
  double start = 0.0;  // lateral offset from the left edge, inclusive
  double end = 0.0;    // exclusive
  double center() const { return 0.5 * (start + end); }
};

struct CrossSection {
  std::vector<PartInterval> parts;
  double total_width = 0.0;
};

inline CrossSection build_cross_section(std::span<const SegmentPart> parts) {
  if (parts.empty()) throw InvalidPart("cross-section needs at least one part");
  CrossSection cs;
  double offset = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const SegmentPart& p = parts[i];
    const std::string where = "part " + std::to_string(i);
    if (p.kind == PartKind::road && (p.lane_count.has_value() != p.lane_width.has_value())) {
      throw InvalidPart(where + ": lane_count and lane_width must be given together");
    }
    if (p.lane_count && (*p.lane_count <= 0 || !(*p.lane_width > 0.0))) {
      throw InvalidPart(where + ": lane fields must be positive");
    }
    if (p.kind == PartKind::road && p.lane_count && p.width > 0.0 &&
        std::abs(p.width - *p.lane_count * *p.lane_width) > 1e-9) {
      throw InvalidPart(where + ": width disagrees with lane_count * lane_width");
    }
    const double w = p.resolved_width();
    if (!(w > 0.0)) throw InvalidPart(where + ": width must be positive");
    PartInterval iv{p, offset, offset + w};
    iv.part.width = w;
    cs.parts.push_back(iv);
    offset += w;
  }
  cs.total_width = offset;
  return cs;
}

}  // namespace taftwin::procgen
