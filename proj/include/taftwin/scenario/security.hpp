#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "taftwin/scenario/runner.hpp"
#include "taftwin/v2x/misbehavior.hpp"

namespace taftwin::scenario {

// Mirrors a frame stream as V2X traffic and checks it. Motor vehicles and V2X-sourced
// participants broadcast CAMs; the roadside object list that confirms them (R4) holds every
// participant the infrastructure sensors can see, i.e. all but V2X-sourced ones.
class SecurityObserver {
 public:
  SecurityObserver(GeoAnchor anchor, v2x::PlausibilityParams params = {}, double cam_rate_hz = v2x::kDefaultCamRateHz)
      : emitter_(anchor, cam_rate_hz), checker_(anchor, params) {}

  void observe(const cosim::Frame& f) {
    perception_.clear();
    for (const auto& p : f.participants) {
      if (p.source != Source::v2x) perception_.push_back(p.position);
    }
    for (const auto& p : f.participants) {
      if (!is_motor_vehicle(p.cls)) continue;
      auto cam = emitter_.emit(p);
      if (!cam) continue;
      ++cams_;
      if (on_cam) on_cam(*cam);
      for (auto& v : checker_.check(*cam, &perception_)) verdicts_.push_back(std::move(v));
    }
  }

  const std::vector<v2x::MisbehaviorVerdict>& verdicts() const { return verdicts_; }
  std::size_t cams() const { return cams_; }
  std::function<void(const v2x::CamMessage&)> on_cam;

 private:
  v2x::CamEmitter emitter_;
  v2x::PlausibilityChecker checker_;
  std::vector<Vec3> perception_;
  std::vector<v2x::MisbehaviorVerdict> verdicts_;
  std::size_t cams_ = 0;
};

struct DetectionScore {
  std::size_t verdicts = 0;
  std::size_t true_positive_verdicts = 0;  // verdicts against spoofed stations
  std::size_t spoofed_stations = 0;
  std::size_t detected_stations = 0;
  std::optional<double> precision;  // undefined without verdicts
  std::optional<double> recall;     // undefined without spoofed stations
  std::map<std::string, std::size_t> per_rule;
};

inline DetectionScore score_detection(const std::vector<v2x::MisbehaviorVerdict>& verdicts,
                                      const std::vector<GhostLabel>& labels,
                                      std::optional<v2x::Rule> only_rule = std::nullopt) {
  std::set<ParticipantId> spoofed;
  for (const auto& l : labels) spoofed.insert(l.ghost);
  DetectionScore s;
  std::set<ParticipantId> detected;
  for (const auto& v : verdicts) {
    if (only_rule && v.rule != *only_rule) continue;
    ++s.verdicts;
    ++s.per_rule[std::string(v2x::rule_id(v.rule))];
    if (spoofed.count(v.station_id)) {
      ++s.true_positive_verdicts;
      detected.insert(v.station_id);
    }
  }
  s.spoofed_stations = spoofed.size();
  s.detected_stations = detected.size();
  if (s.verdicts > 0) s.precision = static_cast<double>(s.true_positive_verdicts) / static_cast<double>(s.verdicts);
  if (!spoofed.empty()) s.recall = static_cast<double>(s.detected_stations) / static_cast<double>(s.spoofed_stations);
  return s;
}

struct AttackOutcome {
  RunResult run;
  std::vector<v2x::MisbehaviorVerdict> verdicts;
  DetectionScore score;
  // Victim speed per frame while tracked: (sim_time, speed).
  std::vector<std::pair<double, double>> victim_speed;
};

// Runs a scenario with an optional ghost, mirroring it as V2X traffic through the checker.
inline AttackOutcome run_attack(const ScenarioConfig& cfg, const std::optional<AttackSpec>& attack,
                                const std::function<void(const cosim::Frame&)>& on_frame = {},
                                v2x::PlausibilityParams params = {}) {
  SecurityObserver obs(cfg.network.anchor, params);
  AttackOutcome out;
  std::optional<ParticipantId> victim;
  RunOptions opt;
  opt.attack = attack;
  std::vector<std::pair<double, std::map<ParticipantId, double>>> speeds;
  opt.on_frame = [&](const cosim::Frame& f) {
    obs.observe(f);
    std::map<ParticipantId, double> sp;
    for (const auto& p : f.participants) sp[p.id] = p.speed;
    speeds.emplace_back(f.sim_time, std::move(sp));
    if (on_frame) on_frame(f);
  };
  out.run = run_scenario(cfg, opt);
  out.verdicts = obs.verdicts();
  out.score = score_detection(out.verdicts, out.run.labels);
  if (!out.run.labels.empty()) victim = out.run.labels.front().victim;
  if (victim) {
    for (const auto& [t, sp] : speeds) {
      if (auto it = sp.find(*victim); it != sp.end()) out.victim_speed.emplace_back(t, it->second);
    }
  }
  return out;
}

inline void write_verdicts_csv(std::ostream& os, const std::vector<v2x::MisbehaviorVerdict>& verdicts,
                               const std::vector<GhostLabel>& labels) {
  std::set<ParticipantId> spoofed;
  for (const auto& l : labels) spoofed.insert(l.ghost);
  os << "station_id,rule,timestamp,severity,measured,bound,evidence,spoofed\n";
  char buf[256];
  for (const auto& v : verdicts) {
    std::snprintf(buf, sizeof buf, "%llu,%s,%.3f,%.4f,%.4f,%.4f,%zu,%d\n", static_cast<unsigned long long>(v.station_id),
                  std::string(v2x::rule_id(v.rule)).c_str(), v.evidence.back().timestamp, v.severity, v.measured, v.bound,
                  v.evidence.size(), spoofed.count(v.station_id) ? 1 : 0);
    os << buf;
  }
}

inline void write_labels_csv(std::ostream& os, const std::vector<GhostLabel>& labels) {
  os << "ghost_id,victim_id,t_start,t_end,spoofed\n";
  char buf[160];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.3f,%.3f,1\n", static_cast<unsigned long long>(l.ghost),
                  static_cast<unsigned long long>(l.victim), l.t_start, l.t_end);
    os << buf;
  }
}

}  // namespace taftwin::scenario
