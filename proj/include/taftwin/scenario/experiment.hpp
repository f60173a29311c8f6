#pragma once

#include <cstdio>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "taftwin/scenario/runner.hpp"

namespace taftwin::scenario {

class ConfigMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct VariantRow {
  std::string variant;  // "n.opt" or "opt"
  std::uint64_t seed = 0;
  std::optional<signals::LostTimeStats> vru;
  std::optional<signals::LostTimeStats> vehicles;
};

// Pooled statistics over every record of every seed of one variant.
struct VariantAggregate {
  std::optional<signals::LostTimeStats> vru;
  std::optional<signals::LostTimeStats> vehicles;
};

struct ExperimentResult {
  std::vector<VariantRow> rows;
  VariantAggregate base;
  VariantAggregate optimized;
  // (opt - n.opt) / n.opt of the pooled averages; empty when the baseline average is zero.
  std::optional<double> vru_change;
  std::optional<double> vehicle_change;
};

inline json demand_key(const ScenarioConfig& c) {
  json veh = json::array();
  for (const auto& v : c.vehicles) veh.push_back({v.lane, std::string(to_string(v.cls)), v.per_hour, v.times});
  json ped = json::array();
  for (const auto& p : c.pedestrians) ped.push_back({p.path, p.per_hour, p.times, p.walk_speed_min, p.walk_speed_max});
  return json{{"network", c.network}, {"vehicles", veh}, {"pedestrians", ped}, {"duration", c.duration}, {"dt", c.dt}};
}

inline void require_comparable(const ScenarioConfig& a, const ScenarioConfig& b) {
  if (demand_key(a) != demand_key(b)) throw ConfigMismatch("experiment variants must share network, demand, duration and dt");
}

namespace detail {
inline std::optional<double> relative_change(const std::optional<signals::LostTimeStats>& base,
                                             const std::optional<signals::LostTimeStats>& opt) {
  if (!base || !opt || base->avg == 0.0) return std::nullopt;
  return (opt->avg - base->avg) / base->avg;
}
}  // namespace detail

// Runs both variants for seeds base.seed, base.seed + 1, ... on worker threads. Every run owns
// its world, so results do not depend on scheduling.
inline ExperimentResult signal_experiment(const ScenarioConfig& base, const ScenarioConfig& optimized,
                                          std::size_t repetitions) {
  require_comparable(base, optimized);
  if (repetitions == 0) throw ConfigError("repetitions must be positive");
  struct Job {
    std::string variant;
    ScenarioConfig cfg;
    std::future<RunResult> result;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < repetitions; ++i) {
    for (int variant = 0; variant < 2; ++variant) {
      ScenarioConfig c = variant == 0 ? base : optimized;
      c.seed = base.seed + i;
      jobs.push_back({variant == 0 ? "n.opt" : "opt", c, {}});
    }
  }
  for (auto& j : jobs) j.result = std::async(std::launch::async, [cfg = j.cfg] { return run_scenario(cfg); });

  ExperimentResult out;
  std::vector<signals::LostTimeRecord> pooled_base, pooled_opt;
  for (auto& j : jobs) {
    const RunResult r = j.result.get();
    VariantRow row{j.variant, j.cfg.seed, std::nullopt, std::nullopt};
    if (!r.lost.empty()) {
      const auto s = signals::aggregate_lost_time(r.lost);
      row.vru = s.vru;
      row.vehicles = s.vehicles;
    }
    out.rows.push_back(row);
    auto& pool = j.variant == "n.opt" ? pooled_base : pooled_opt;
    pool.insert(pool.end(), r.lost.begin(), r.lost.end());
  }
  auto aggregate = [](const std::vector<signals::LostTimeRecord>& recs) {
    VariantAggregate a;
    if (recs.empty()) return a;
    const auto s = signals::aggregate_lost_time(recs);
    a.vru = s.vru;
    a.vehicles = s.vehicles;
    return a;
  };
  out.base = aggregate(pooled_base);
  out.optimized = aggregate(pooled_opt);
  out.vru_change = detail::relative_change(out.base.vru, out.optimized.vru);
  out.vehicle_change = detail::relative_change(out.base.vehicles, out.optimized.vehicles);
  return out;
}

namespace detail {
inline std::string stat_cells(const std::optional<signals::LostTimeStats>& s) {
  if (!s) return ",,,";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu,%.3f,%.3f,%.3f", s->count, s->avg, s->max, s->min);
  return buf;
}
inline std::string change_cell(const std::optional<double>& c) {
  if (!c) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *c);
  return buf;
}
}  // namespace detail

// One row per (variant, seed, class) plus pooled rows with seed "all" and a change row.
inline void write_experiment_csv(std::ostream& os, const ExperimentResult& r) {
  os << "variant,seed,class,count,avg,max,min\n";
  for (const auto& row : r.rows) {
    os << row.variant << ',' << row.seed << ",VRU," << detail::stat_cells(row.vru) << '\n';
    os << row.variant << ',' << row.seed << ",Vehicles," << detail::stat_cells(row.vehicles) << '\n';
  }
  os << "n.opt,all,VRU," << detail::stat_cells(r.base.vru) << '\n';
  os << "n.opt,all,Vehicles," << detail::stat_cells(r.base.vehicles) << '\n';
  os << "opt,all,VRU," << detail::stat_cells(r.optimized.vru) << '\n';
  os << "opt,all,Vehicles," << detail::stat_cells(r.optimized.vehicles) << '\n';
  os << "change,all,VRU,," << detail::change_cell(r.vru_change) << ",,\n";
  os << "change,all,Vehicles,," << detail::change_cell(r.vehicle_change) << ",,\n";
}

inline void write_experiment_table(std::ostream& os, const ExperimentResult& r) {
  char buf[256];
  auto line = [&](const char* cls, const std::optional<signals::LostTimeStats>& b,
                  const std::optional<signals::LostTimeStats>& o, const std::optional<double>& c) {
    auto v = [](const std::optional<signals::LostTimeStats>& s, double signals::LostTimeStats::*f) {
      return s ? (*s).*f : 0.0;
    };
    std::snprintf(buf, sizeof buf, "%-9s %8.2f %8.2f %8.2f | %8.2f %8.2f %8.2f | %+7.1f %%\n", cls,
                  v(b, &signals::LostTimeStats::avg), v(b, &signals::LostTimeStats::max), v(b, &signals::LostTimeStats::min),
                  v(o, &signals::LostTimeStats::avg), v(o, &signals::LostTimeStats::max), v(o, &signals::LostTimeStats::min),
                  c ? *c * 100.0 : 0.0);
    os << buf;
  };
  os << "lost time [s]        n.opt avg/max/min      |        opt avg/max/min      | change\n";
  line("VRU", r.base.vru, r.optimized.vru, r.vru_change);
  line("Vehicles", r.base.vehicles, r.optimized.vehicles, r.vehicle_change);
}

}  // namespace taftwin::scenario
