#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taftwin/behavior/driver.hpp"
#include "taftwin/core/json_io.hpp"
#include "taftwin/cosim/recording.hpp"
#include "taftwin/signals/program_io.hpp"

namespace taftwin::scenario {

// Vehicles entering on `lane`. Arrivals are Poisson at `per_hour`, plus any explicit `times`.
struct VehicleStream {
  std::string name;
  LaneId lane = 0;
  ParticipantClass cls = ParticipantClass::car;
  double per_hour = 0.0;
  std::vector<double> times;
};

// Where a pedestrian path enters a signalised crossing.
struct CrossingPoint {
  std::size_t waypoint = 0;
  GroupId group;
};

struct PedestrianStream {
  std::string name;
  std::vector<Vec3> path;
  std::vector<CrossingPoint> crossings;
  double per_hour = 0.0;
  std::vector<double> times;
  double walk_speed_min = 1.1;
  double walk_speed_max = 1.4;
};

struct ScenarioConfig {
  std::string name;
  RoadNetwork network;
  std::map<std::string, signals::SignalProgram> programs;
  std::string program;  // empty: unsignalised
  behavior::DriverParams driver;
  behavior::DriverTuning tuning;
  std::vector<VehicleStream> vehicles;
  std::vector<PedestrianStream> pedestrians;
  double duration = 600.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
  double detector_range = 30.0;  // stop-line detector reach upstream [m]
  cosim::RecordingMetadata environment;
};

// Network document: the road network plus an optional `signal_programs` array.
inline std::map<std::string, signals::SignalProgram> programs_from(const json& network_doc) {
  std::map<std::string, signals::SignalProgram> out;
  for (const auto& pj : get_field_or<json>(network_doc, "signal_programs", json::array())) {
    auto p = pj.get<signals::SignalProgram>();
    if (p.name.empty()) throw ConfigError("signal programs need a name");
    if (!out.emplace(p.name, p).second) throw ConfigError("duplicate signal program '" + p.name + "'");
  }
  return out;
}

inline void validate_config(const ScenarioConfig& c) {
  if (!(c.duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.detector_range >= 0.0)) throw ConfigError("detector_range must be non-negative");
  try {
    behavior::check_params(c.driver);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("driver: ") + e.what());
  }
  if (!c.program.empty()) {
    auto it = c.programs.find(c.program);
    if (it == c.programs.end()) throw ConfigError("unknown signal program '" + c.program + "'");
    signals::validate_program(it->second, c.network);
  }
  for (const auto& v : c.vehicles) {
    if (!(v.per_hour >= 0.0)) throw ConfigError("vehicle stream '" + v.name + "': per_hour must be >= 0");
    if (!c.network.find_lane(v.lane)) throw ConfigError("vehicle stream '" + v.name + "': unknown lane");
    if (!is_motor_vehicle(v.cls)) throw ConfigError("vehicle stream '" + v.name + "': class must be a motor vehicle");
  }
  for (const auto& p : c.pedestrians) {
    if (!(p.per_hour >= 0.0)) throw ConfigError("pedestrian stream '" + p.name + "': per_hour must be >= 0");
    if (p.path.size() < 2) throw ConfigError("pedestrian stream '" + p.name + "': path needs two points");
    if (!(p.walk_speed_min > 0.0) || p.walk_speed_max < p.walk_speed_min) {
      throw ConfigError("pedestrian stream '" + p.name + "': bad walk speed range");
    }
    for (const auto& cp : p.crossings) {
      if (cp.waypoint >= p.path.size()) throw ConfigError("pedestrian stream '" + p.name + "': crossing waypoint out of range");
      if (!c.network.find_group(cp.group)) throw ConfigError("pedestrian stream '" + p.name + "': unknown group " + cp.group);
      if (c.program.empty()) throw ConfigError("pedestrian crossings need a signal program");
    }
  }
}

inline ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  ScenarioConfig c;
  c.name = get_field_or<std::string>(j, "name", "");
  const json net = get_field<json>(j, "network");
  const json net_doc = net.is_string() ? read_json_file((base_dir / net.get<std::string>()).string()) : net;
  c.network = net_doc.get<RoadNetwork>();
  c.programs = programs_from(net_doc);
  c.program = get_field_or<std::string>(j, "signal_program", "");

  const json d = get_field_or<json>(j, "driver", json::object());
  c.driver.v_mu = get_field_or<double>(d, "v_mu", c.driver.v_mu);
  c.driver.v_sigma = get_field_or<double>(d, "v_sigma", c.driver.v_sigma);
  c.driver.a = get_field_or<double>(d, "a", c.driver.a);
  c.driver.a_b = get_field_or<double>(d, "a_b", c.driver.a_b);
  c.tuning.d_margin = get_field_or<double>(d, "d_margin", c.tuning.d_margin);
  c.tuning.lookahead_m = get_field_or<double>(d, "lookahead_m", c.tuning.lookahead_m);

  for (const auto& v : get_field_or<json>(j, "vehicles", json::array())) {
    VehicleStream s;
    s.name = get_field_or<std::string>(v, "name", "");
    s.lane = get_field<LaneId>(v, "lane");
    const auto cls = parse_class(get_field_or<std::string>(v, "class", "car"));
    if (!cls) throw ConfigError("unknown participant class in vehicle stream");
    s.cls = *cls;
    s.per_hour = get_field_or<double>(v, "per_hour", 0.0);
    s.times = get_field_or<std::vector<double>>(v, "times", {});
    c.vehicles.push_back(std::move(s));
  }
  for (const auto& p : get_field_or<json>(j, "pedestrians", json::array())) {
    PedestrianStream s;
    s.name = get_field_or<std::string>(p, "name", "");
    s.path = get_field<std::vector<Vec3>>(p, "path");
    for (const auto& cp : get_field_or<json>(p, "crossings", json::array())) {
      s.crossings.push_back({get_field<std::size_t>(cp, "waypoint"), get_field<std::string>(cp, "group")});
    }
    s.per_hour = get_field_or<double>(p, "per_hour", 0.0);
    s.times = get_field_or<std::vector<double>>(p, "times", {});
    s.walk_speed_min = get_field_or<double>(p, "walk_speed_min", s.walk_speed_min);
    s.walk_speed_max = get_field_or<double>(p, "walk_speed_max", s.walk_speed_max);
    c.pedestrians.push_back(std::move(s));
  }

  c.duration = get_field_or<double>(j, "duration", c.duration);
  c.dt = get_field_or<double>(j, "dt", c.dt);
  c.seed = get_field_or<std::uint64_t>(j, "seed", c.seed);
  c.detector_range = get_field_or<double>(j, "detector_range", c.detector_range);
  const json env = get_field_or<json>(j, "environment", json::object());
  c.environment = {get_field_or<std::string>(env, "time_of_day", ""), get_field_or<std::string>(env, "weather", ""),
                   get_field_or<std::string>(env, "season", "")};
  validate_config(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  const json j = read_json_file(path);
  return config_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace taftwin::scenario
