#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "taftwin/core/types.hpp"

namespace taftwin::signals {

class DegenerateTrajectory : public Error {
 public:
  DegenerateTrajectory() : Error("trajectory needs at least two samples") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("no lost-time records") {}
};

struct TrajectorySample {
  double t = 0.0;
  double s = 0.0;  // arc position [m]
};

struct LostTimeRecord {
  ParticipantId id = 0;
  ParticipantClass cls = ParticipantClass::unknown;
  double t_entry = 0.0;
  double t_exit = 0.0;
  double free_flow_s = 0.0;
  double lost_s = 0.0;
  double actual_s() const { return t_exit - t_entry; }
};

inline LostTimeRecord lost_time(std::span<const TrajectorySample> trajectory, double free_flow_speed,
                                ParticipantId id = 0, ParticipantClass cls = ParticipantClass::unknown) {
  if (trajectory.size() < 2) throw DegenerateTrajectory();
  if (!(free_flow_speed > 0.0)) throw PreconditionError("free-flow speed must be positive");
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory[i].t < trajectory[i - 1].t) throw PreconditionError("trajectory not monotone in time");
  }
  LostTimeRecord r;
  r.id = id;
  r.cls = cls;
  r.t_entry = trajectory.front().t;
  r.t_exit = trajectory.back().t;
  r.free_flow_s = (trajectory.back().s - trajectory.front().s) / free_flow_speed;
  r.lost_s = std::max(0.0, r.actual_s() - r.free_flow_s);
  return r;
}

struct LostTimeStats {
  std::size_t count = 0;
  double avg = 0.0;
  double max = 0.0;
  double min = 0.0;
};

// Buckets: "VRU" (pedestrian, bicycle), "Vehicles" (car, truck, bus, tram), "All".
// A bucket without records maps to nullopt.
struct LostTimeSummary {
  std::optional<LostTimeStats> vru;
  std::optional<LostTimeStats> vehicles;
  LostTimeStats all;

  const std::optional<LostTimeStats>& bucket(std::string_view name) const {
    static const std::optional<LostTimeStats> none;
    if (name == "VRU") return vru;
    if (name == "Vehicles") return vehicles;
    return none;
  }
};

namespace detail {
inline std::optional<LostTimeStats> stats_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  LostTimeStats s;
  s.count = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.avg = sum / static_cast<double>(v.size());
  s.max = *std::max_element(v.begin(), v.end());
  s.min = *std::min_element(v.begin(), v.end());
  return s;
}
}  // namespace detail

inline LostTimeSummary aggregate_lost_time(std::span<const LostTimeRecord> records) {
  if (records.empty()) throw EmptyInput();
  std::vector<double> vru, veh, all;
  for (const auto& r : records) {
    all.push_back(r.lost_s);
    if (is_vru(r.cls)) vru.push_back(r.lost_s);
    if (is_motor_vehicle(r.cls)) veh.push_back(r.lost_s);
  }
  LostTimeSummary s;
  s.vru = detail::stats_of(vru);
  s.vehicles = detail::stats_of(veh);
  s.all = *detail::stats_of(all);
  return s;
}

inline void write_lost_time_csv(std::ostream& os, std::span<const LostTimeRecord> records) {
  os << "id,class,t_entry,t_exit,free_flow_s,lost_s\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%s,%.3f,%.3f,%.3f,%.3f\n", static_cast<unsigned long long>(r.id),
                  std::string(to_string(r.cls)).c_str(), r.t_entry, r.t_exit, r.free_flow_s, r.lost_s);
    os << buf;
  }
}

}  // namespace taftwin::signals
