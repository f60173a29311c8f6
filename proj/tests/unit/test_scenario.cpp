#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "taftwin/core/network.hpp"
#include "taftwin/cosim/recording.hpp"
#include "taftwin/scenario/experiment.hpp"
#include "taftwin/scenario/security.hpp"
#include "taftwin/signals/model_check.hpp"

using namespace taftwin;
using namespace taftwin::scenario;

namespace {

const std::string kScenarios = TAFTWIN_SCENARIO_DIR;

ScenarioConfig ghost_demo() { return load_config(kScenarios + "/ghost_demo.json"); }

AttackSpec ghost_attack() { return attack_from_json(read_json_file(kScenarios + "/ghost_attack.json")); }

std::vector<cosim::Frame> frames_of(const ScenarioConfig& cfg, const std::optional<AttackSpec>& attack = std::nullopt) {
  std::vector<cosim::Frame> out;
  RunOptions opt;
  opt.attack = attack;
  opt.on_frame = [&](const cosim::Frame& f) { out.push_back(f); };
  run_scenario(cfg, opt);
  return out;
}

// Straight three-lane road: lanes 1 and 2 run east in parallel, lane 3 runs west.
ScenarioConfig three_lane_road() {
  json net{{"anchor", {{"origin_lat", 48.0}, {"origin_lon", 11.0}}},
           {"lanes",
            {{{"id", 1}, {"width", 3.5}, {"centerline", {{0, 0}, {600, 0}}}},
             {{"id", 2}, {"width", 3.5}, {"centerline", {{0, 4}, {600, 4}}}},
             {{"id", 3}, {"width", 3.5}, {"centerline", {{600, 8}, {0, 8}}}}}}};
  json cfg{{"network", net},
           {"driver", {{"v_mu", 12.0}, {"v_sigma", 1.0}}},
           {"vehicles",
            {{{"lane", 1}, {"times", {0.0}}},
             {{"lane", 2}, {"per_hour", 900}},
             {{"lane", 3}, {"per_hour", 900}}}},
           {"duration", 40},
           {"seed", 3}};
  return config_from_json(cfg);
}

}  // namespace

// ---- configuration ----

TEST(ScenarioConfig, ShippedConfigsLoadAndShareDemand) {
  const auto a = load_config(kScenarios + "/four_arm_nopt.json");
  const auto b = load_config(kScenarios + "/four_arm_opt.json");
  EXPECT_NO_THROW(require_comparable(a, b));
  EXPECT_TRUE(validate_network(a.network).ok());
  EXPECT_EQ(a.programs.at(a.program).mode, signals::SignalMode::fixed);
  EXPECT_EQ(b.programs.at(b.program).mode, signals::SignalMode::vru_optimized);
}

TEST(ScenarioConfig, ShippedProgramsPassTheModelCheck) {
  const auto a = load_config(kScenarios + "/four_arm_opt.json");
  for (const auto& [name, program] : a.programs) {
    signals::ModelCheckOptions opt;
    opt.dt = 1.0;  // every program boundary lies on a whole second
    const auto rep = signals::model_check(program, a.network, opt);
    EXPECT_TRUE(rep.ok()) << name << ": " << (rep.violations.empty() ? "truncated" : rep.violations.front());
  }
}

TEST(ScenarioConfig, InvalidValuesAreConfigErrors) {
  json j = read_json_file(kScenarios + "/ghost_demo.json");
  auto with = [&](const char* key, json v) {
    json c = j;
    c[key] = std::move(v);
    return c;
  };
  EXPECT_THROW(config_from_json(with("duration", 0)), ConfigError);
  EXPECT_THROW(config_from_json(with("dt", -0.1)), ConfigError);
  EXPECT_THROW(config_from_json(with("signal_program", "missing")), ConfigError);
  EXPECT_THROW(config_from_json(with("vehicles", json::array({{{"lane", 77}}}))), ConfigError);
  EXPECT_THROW(config_from_json(with("vehicles", json::array({{{"lane", 1}, {"per_hour", -1}}}))), ConfigError);
  EXPECT_THROW(config_from_json(with("vehicles", json::array({{{"lane", 1}, {"class", "pedestrian"}}}))), ConfigError);
  EXPECT_THROW(load_config(kScenarios + "/does_not_exist.json"), ConfigError);
}

TEST(ScenarioConfig, MismatchedVariantsAreRejected) {
  const auto a = load_config(kScenarios + "/four_arm_nopt.json");
  auto b = a;
  b.vehicles[0].per_hour += 1.0;
  EXPECT_THROW(require_comparable(a, b), ConfigMismatch);
  EXPECT_THROW(signal_experiment(a, b, 1), ConfigMismatch);
}

// ---- runs ----

TEST(ScenarioRun, SameSeedGivesByteIdenticalRecording) {
  auto cfg = load_config(kScenarios + "/four_arm_opt.json");
  cfg.duration = 60.0;
  auto record = [&] {
    cosim::ScenarioRecording rec{recording_header(cfg), frames_of(cfg)};
    return cosim::serialize_recording(rec);
  };
  const std::string first = record();
  EXPECT_EQ(first, record());
  cfg.seed = 2;
  EXPECT_NE(first, record());
}

TEST(ScenarioRun, EmptyDemandRecordsOnlySignals) {
  const auto cfg = load_config(kScenarios + "/empty_60s.json");
  const auto frames = frames_of(cfg);
  ASSERT_EQ(frames.size(), 1201u);
  for (const auto& f : frames) {
    EXPECT_TRUE(f.participants.empty());
    EXPECT_EQ(f.signals.size(), 8u);
  }
  EXPECT_EQ(frames[0].signals.at("V_EW"), "green");
  EXPECT_EQ(frames[920].signals.at("V_NS"), "green");  // t = 46
}

TEST(ScenarioRun, DemandIsIndependentOfTheSignalProgram) {
  auto a = load_config(kScenarios + "/four_arm_nopt.json");
  auto b = load_config(kScenarios + "/four_arm_opt.json");
  a.duration = b.duration = 200.0;
  const auto ra = run_scenario(a);
  const auto rb = run_scenario(b);
  EXPECT_EQ(ra.pedestrians_spawned, rb.pedestrians_spawned);
  EXPECT_GT(ra.vehicles_spawned, 50u);
}

TEST(ScenarioRun, FreeFlowVehicleLosesNoTime) {
  auto cfg = ghost_demo();
  cfg.duration = 60.0;
  const auto r = run_scenario(cfg);
  ASSERT_EQ(r.lost.size(), 1u);
  EXPECT_LT(r.lost[0].lost_s, 0.1);
}

TEST(ScenarioRun, VehiclesNeverOverlapInLane) {
  auto cfg = load_config(kScenarios + "/four_arm_nopt.json");
  cfg.duration = 300.0;
  std::size_t checked = 0;
  RunOptions opt;
  opt.on_frame = [&](const cosim::Frame& f) {
    for (std::size_t i = 0; i < f.participants.size(); ++i) {
      const auto& a = f.participants[i];
      if (!is_motor_vehicle(a.cls)) continue;
      for (std::size_t j = i + 1; j < f.participants.size(); ++j) {
        const auto& b = f.participants[j];
        if (!is_motor_vehicle(b.cls) || std::abs(normalize_yaw(a.yaw - b.yaw)) > 1e-6) continue;
        const double lateral = std::abs(-(b.position.x - a.position.x) * std::sin(a.yaw) + (b.position.y - a.position.y) * std::cos(a.yaw));
        if (lateral > 1.0) continue;
        const double along = std::abs((b.position.x - a.position.x) * std::cos(a.yaw) + (b.position.y - a.position.y) * std::sin(a.yaw));
        EXPECT_GT(along - (a.dimensions.length + b.dimensions.length) / 2.0, 0.0) << "t=" << f.sim_time;
        ++checked;
      }
    }
  };
  run_scenario(cfg, opt);
  EXPECT_GT(checked, 1000u);
}

TEST(ScenarioRun, PedestriansOnlyLeaveAStopPointOnGreen) {
  auto cfg = load_config(kScenarios + "/four_arm_nopt.json");
  cfg.duration = 300.0;
  std::vector<std::pair<Vec3, GroupId>> points;
  for (const auto& ps : cfg.pedestrians) {
    for (const auto& c : ps.crossings) points.emplace_back(ps.path[c.waypoint], c.group);
  }
  std::map<ParticipantId, Vec3> prev_pos;
  std::map<std::string, std::string> prev_signals;
  std::size_t departures = 0;
  RunOptions opt;
  opt.on_frame = [&](const cosim::Frame& f) {
    std::map<ParticipantId, Vec3> pos;
    for (const auto& p : f.participants) {
      if (p.cls != ParticipantClass::pedestrian) continue;
      pos[p.id] = p.position;
      auto it = prev_pos.find(p.id);
      if (it == prev_pos.end()) continue;
      for (const auto& [pt, group] : points) {
        if (distance_xy(it->second, pt) < 1e-6 && distance_xy(p.position, pt) > 1e-6) {
          EXPECT_EQ(prev_signals.at(group), "green") << "t=" << f.sim_time;
          ++departures;
        }
      }
    }
    prev_pos = std::move(pos);
    prev_signals = f.signals;
  };
  run_scenario(cfg, opt);
  EXPECT_GT(departures, 5u);
}

TEST(ScenarioExperiment, IdenticalVariantsShowNoChange) {
  auto a = load_config(kScenarios + "/four_arm_nopt.json");
  a.duration = 120.0;
  const auto r = signal_experiment(a, a, 2);
  ASSERT_TRUE(r.vehicle_change);
  EXPECT_DOUBLE_EQ(*r.vehicle_change, 0.0);
  if (r.vru_change) EXPECT_DOUBLE_EQ(*r.vru_change, 0.0);
  EXPECT_EQ(r.rows.size(), 4u);
  std::ostringstream csv;
  write_experiment_csv(csv, r);
  std::size_t lines = 0;
  for (char c : csv.str()) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 8u + 4u + 2u);
}

// ---- ghost injection ----

TEST(Ghost, StoppedGhostAheadSlowsTheVictim) {
  const auto out = run_attack(ghost_demo(), ghost_attack());
  ASSERT_EQ(out.run.labels.size(), 1u);
  const double start = out.run.labels[0].t_start;
  bool slowed = false;
  for (const auto& [t, v] : out.victim_speed) {
    if (t >= start && t <= start + 5.0 && v < 5.0) slowed = true;
  }
  EXPECT_TRUE(slowed);
}

TEST(Ghost, ZeroDurationLeavesTheScenarioUnchanged) {
  auto atk = ghost_attack();
  atk.duration = 0.0;
  EXPECT_EQ(frames_of(ghost_demo(), atk), frames_of(ghost_demo()));
}

TEST(Ghost, GhostBehindTheVictimHasNoEffect) {
  auto atk = ghost_attack();
  atk.offset_ahead = -20.0;
  const auto out = run_attack(ghost_demo(), atk);
  ASSERT_FALSE(out.victim_speed.empty());
  for (const auto& [t, v] : out.victim_speed) {
    if (t >= atk.start_t && t <= atk.start_t + atk.duration) EXPECT_NEAR(v, 10.0, 0.1) << t;
  }
}

TEST(Ghost, EmptyLaneRaisesNoVictim) {
  auto atk = ghost_attack();
  atk.start_t = 0.0;  // the victim enters only in the first frame after t = 0
  EXPECT_THROW(run_scenario(ghost_demo(), {atk, {}}), NoVictim);
}

TEST(Ghost, GhostIsLabelledAndSourcedFromV2x) {
  std::size_t seen = 0;
  const auto out = run_attack(ghost_demo(), ghost_attack(), [&](const cosim::Frame& f) {
    for (const auto& p : f.participants) {
      if (p.source == Source::v2x) ++seen;
    }
  });
  ASSERT_EQ(out.run.labels.size(), 1u);
  EXPECT_EQ(seen, 200u);  // 10 s at 20 Hz
  EXPECT_EQ(out.score.recall, 1.0);
  EXPECT_EQ(out.score.precision, 1.0);
  EXPECT_EQ(out.score.per_rule.at("R4"), 1u);
}

TEST(Ghost, V2xOnlyGhostLeavesBystandersUntouched) {
  const auto cfg = three_lane_road();
  AttackSpec atk{1, 15.0, 0.0, 8.0, 10.0, GhostMode::v2x_only};
  const auto clean = frames_of(cfg);
  const auto attacked = frames_of(cfg, atk);
  ASSERT_EQ(clean.size(), attacked.size());
  ParticipantId victim = 0;
  for (const auto& p : clean[static_cast<std::size_t>(8.0 / cfg.dt)].participants) {
    if (std::abs(p.position.y) < 1e-9) victim = p.id;
  }
  ASSERT_NE(victim, 0u);
  bool victim_differs = false;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    std::map<ParticipantId, ParticipantState> a;
    for (const auto& p : attacked[k].participants) a[p.id] = p;
    for (const auto& p : clean[k].participants) {
      auto it = a.find(p.id);
      ASSERT_NE(it, a.end());
      if (p.id == victim) {
        victim_differs = victim_differs || !(it->second == p);
      } else {
        EXPECT_EQ(it->second, p) << "id " << p.id << " frame " << k;
      }
    }
  }
  EXPECT_TRUE(victim_differs);
}

// ---- security observer ----

TEST(Security, CleanTenMinuteRunHasNoVerdicts) {
  const auto out = run_attack(load_config(kScenarios + "/four_arm_opt.json"), std::nullopt);
  EXPECT_TRUE(out.verdicts.empty());
  EXPECT_FALSE(out.score.precision);
  EXPECT_FALSE(out.score.recall);
  EXPECT_GT(out.run.vehicles_spawned, 250u);
}

TEST(Security, VerdictCsvMarksSpoofedStations) {
  const auto out = run_attack(ghost_demo(), ghost_attack());
  std::ostringstream os;
  write_verdicts_csv(os, out.verdicts, out.run.labels);
  EXPECT_NE(os.str().find(",R4,"), std::string::npos);
  EXPECT_EQ(os.str().back(), '\n');
  EXPECT_EQ(os.str().substr(os.str().size() - 3), ",1\n");
}
