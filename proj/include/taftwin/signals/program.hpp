#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "taftwin/core/network.hpp"

namespace taftwin::signals {

enum class SignalMode { fixed, actuated, vru_optimized };
enum class LightState { red, green };

inline std::string_view to_string(SignalMode m) {
  switch (m) {
    case SignalMode::fixed: return "fixed";
    case SignalMode::actuated: return "actuated";
    case SignalMode::vru_optimized: return "vru_optimized";
  }
  return "fixed";
}

inline SignalMode parse_mode(std::string_view s) {
  if (s == "fixed") return SignalMode::fixed;
  if (s == "actuated") return SignalMode::actuated;
  if (s == "vru_optimized") return SignalMode::vru_optimized;
  throw ConfigError("unknown signal mode '" + std::string(s) + "'");
}

inline std::string_view to_string(LightState s) { return s == LightState::green ? "green" : "red"; }

class UnknownGroup : public Error {
 public:
  explicit UnknownGroup(const GroupId& g) : Error("unknown signal group '" + g + "'") {}
};

struct GreenInterval {
  double start = 0.0;
  double end = 0.0;
  double duration() const { return end - start; }
  friend bool operator==(const GreenInterval&, const GreenInterval&) = default;
};

// Two-stage crossing: pedestrians released by `first` walk `island_distance` to the
// stop line of `second`.
struct ProgressiveCrossing {
  GroupId first;
  GroupId second;
  double island_distance = 0.0;
  double walk_speed = 1.2;
};

struct SignalProgram {
  std::string name;
  double cycle = 90.0;
  SignalMode mode = SignalMode::fixed;
  std::map<GroupId, std::vector<GreenInterval>> greens;  // [start, end) in cycle seconds
  double min_green = 5.0;
  double max_green = 60.0;
  double gap_time = 3.0;
  double default_intergreen = 5.0;
  std::map<std::pair<GroupId, GroupId>, double> intergreen;  // (ending group, starting group)
  std::vector<ProgressiveCrossing> progressive;

  double intergreen_between(const GroupId& ending, const GroupId& starting) const {
    auto it = intergreen.find({ending, starting});
    return it == intergreen.end() ? default_intergreen : it->second;
  }
};

inline double progressive_crossing_offset(double island_distance, double walk_speed) {
  if (!(island_distance > 0.0) || !(walk_speed > 0.0)) {
    throw PreconditionError("island distance and walk speed must be positive");
  }
  return island_distance / walk_speed;
}

namespace detail {

inline void add_covering(std::vector<GreenInterval>& v, GreenInterval iv) {
  std::vector<GreenInterval> out;
  for (const auto& g : v) {
    if (g.end < iv.start || g.start > iv.end) {
      out.push_back(g);
    } else {
      iv.start = std::min(iv.start, g.start);
      iv.end = std::max(iv.end, g.end);
    }
  }
  out.push_back(iv);
  std::sort(out.begin(), out.end(), [](const GreenInterval& a, const GreenInterval& b) { return a.start < b.start; });
  v = std::move(out);
}

}  // namespace detail

// Green plan actually run for a cycle. In vru_optimized mode the second crossing of each
// progressive pair is kept green over the first crossing's green shifted by the walking
// offset, so anyone entering during the first green finds the second green on arrival.
inline std::map<GroupId, std::vector<GreenInterval>> effective_greens(const SignalProgram& p) {
  auto greens = p.greens;
  if (p.mode != SignalMode::vru_optimized) return greens;
  for (const auto& pc : p.progressive) {
    const double offset = progressive_crossing_offset(pc.island_distance, pc.walk_speed);
    auto first_it = p.greens.find(pc.first);
    if (first_it == p.greens.end()) throw UnknownGroup(pc.first);
    if (!p.greens.count(pc.second)) throw UnknownGroup(pc.second);
    for (const auto& iv : first_it->second) {
      detail::add_covering(greens[pc.second], {iv.start + offset, iv.end + offset});
    }
  }
  return greens;
}

inline LightState signal_state(const SignalProgram& p, const GroupId& group, double t) {
  const auto greens = effective_greens(p);
  auto it = greens.find(group);
  if (it == greens.end()) throw UnknownGroup(group);
  double tc = std::fmod(t, p.cycle);
  if (tc < 0.0) tc += p.cycle;
  for (const auto& iv : it->second) {
    if (tc >= iv.start && tc < iv.end) return LightState::green;
  }
  return LightState::red;
}

inline bool conflicts(const RoadNetwork& net, const GroupId& a, const GroupId& b) {
  const SignalGroup* g = net.find_group(a);
  return g && std::find(g->conflicts.begin(), g->conflicts.end(), b) != g->conflicts.end();
}

// Throws ConfigError on the first violated program invariant.
inline void validate_program(const SignalProgram& p, const RoadNetwork& net) {
  auto fail = [&](const std::string& msg) { throw ConfigError("signal program '" + p.name + "': " + msg); };
  if (!(p.cycle > 0.0)) fail("cycle must be positive");
  if (!(p.min_green > 0.0) || p.max_green < p.min_green) fail("require 0 < min_green <= max_green");
  if (!(p.gap_time > 0.0)) fail("gap_time must be positive");
  for (const auto& [gid, ivs] : p.greens) {
    if (!net.find_group(gid)) fail("unknown group " + gid);
  }
  const auto greens = effective_greens(p);
  for (const auto& [gid, ivs] : greens) {
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      const auto& iv = ivs[i];
      if (iv.start < 0.0 || iv.end > p.cycle || iv.start >= iv.end) fail("interval of " + gid + " outside [0, cycle)");
      if (iv.duration() + 1e-9 < p.min_green) fail("green of " + gid + " shorter than min_green");
      if (i > 0 && ivs[i - 1].end > iv.start) fail("overlapping intervals for " + gid);
    }
  }
  // Conflicting greens separated by the intergreen, including across the cycle wrap.
  for (const auto& [a, ia] : greens) {
    for (const auto& [b, ib] : greens) {
      if (!conflicts(net, a, b)) continue;
      for (const auto& x : ia) {
        for (const auto& y : ib) {
          for (int k = -1; k <= 1; ++k) {
            const double ys = y.start + k * p.cycle;
            const double ye = y.end + k * p.cycle;
            const bool ok = x.end + p.intergreen_between(a, b) <= ys + 1e-9 ||
                            ye + p.intergreen_between(b, a) <= x.start + 1e-9;
            if (!ok) fail("groups " + a + " and " + b + " violate intergreen");
          }
        }
      }
    }
  }
}

}  // namespace taftwin::signals
