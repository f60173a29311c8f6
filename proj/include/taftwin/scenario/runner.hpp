#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "taftwin/cosim/kernel.hpp"
#include "taftwin/cosim/recording.hpp"
#include "taftwin/scenario/world.hpp"

namespace taftwin::scenario {

struct RunOptions {
  std::optional<AttackSpec> attack;
  std::function<void(const cosim::Frame&)> on_frame;  // frame 0 included
};

struct RunResult {
  std::uint64_t frames = 0;  // frames produced after frame 0
  std::vector<signals::LostTimeRecord> lost;
  std::size_t vehicles_spawned = 0;
  std::size_t pedestrians_spawned = 0;
  std::vector<GhostLabel> labels;
};

inline std::uint64_t step_count(const ScenarioConfig& c) {
  return static_cast<std::uint64_t>(std::llround(c.duration / c.dt));
}

inline cosim::RecordingHeader recording_header(const ScenarioConfig& c) {
  cosim::RecordingHeader h;
  h.anchor = c.network.anchor;
  h.dt = c.dt;
  h.metadata = c.environment;
  return h;
}

// Runs the built-in model through the kernel without external clients.
inline RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
  World world(cfg, opt.attack);
  cosim::Kernel kernel(world, cfg.dt);
  if (opt.on_frame) opt.on_frame(kernel.current());
  const std::uint64_t n = step_count(cfg);
  for (std::uint64_t i = 0; i < n; ++i) {
    kernel.tick({});
    if (opt.on_frame) opt.on_frame(kernel.current());
  }
  RunResult r;
  r.frames = n;
  r.lost = world.lost_times();
  r.vehicles_spawned = world.spawned_vehicles();
  r.pedestrians_spawned = world.spawned_pedestrians();
  r.labels = world.ghost_labels();
  return r;
}

inline json stats_json(const std::optional<signals::LostTimeStats>& s) {
  if (!s) return nullptr;
  return json{{"count", s->count}, {"avg", s->avg}, {"max", s->max}, {"min", s->min}};
}

inline json summary_json(const ScenarioConfig& cfg, const RunResult& r) {
  json j{{"scenario", cfg.name},
         {"seed", cfg.seed},
         {"duration", cfg.duration},
         {"dt", cfg.dt},
         {"signal_program", cfg.program},
         {"frames", r.frames},
         {"vehicles_spawned", r.vehicles_spawned},
         {"pedestrians_spawned", r.pedestrians_spawned},
         {"completed", r.lost.size()}};
  json lt = json::object();
  if (!r.lost.empty()) {
    const auto s = signals::aggregate_lost_time(r.lost);
    lt["VRU"] = stats_json(s.vru);
    lt["Vehicles"] = stats_json(s.vehicles);
    lt["All"] = stats_json(s.all);
  }
  j["lost_time"] = lt;
  return j;
}

}  // namespace taftwin::scenario
