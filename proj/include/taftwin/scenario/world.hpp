#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "taftwin/behavior/obstacle.hpp"
#include "taftwin/cosim/model.hpp"
#include "taftwin/scenario/config.hpp"
#include "taftwin/signals/controller.hpp"
#include "taftwin/signals/lost_time.hpp"

namespace taftwin::scenario {

class NoVictim : public Error {
 public:
  using Error::Error;
};

// perception: every vehicle's obstacle scan sees the ghost (sensor-level spoofing).
// v2x_only: only the targeted victim reacts, as a receiver of the forged messages.
enum class GhostMode { perception, v2x_only };

inline GhostMode parse_ghost_mode(const std::string& s) {
  if (s == "perception") return GhostMode::perception;
  if (s == "v2x_only") return GhostMode::v2x_only;
  throw ConfigError("unknown ghost mode '" + s + "'");
}

struct AttackSpec {
  LaneId lane = 0;
  double offset_ahead = 20.0;  // metres along the victim's route; negative places it behind
  double ghost_speed = 0.0;
  double start_t = 0.0;
  double duration = 0.0;
  GhostMode mode = GhostMode::perception;
};

inline AttackSpec attack_from_json(const json& j) {
  AttackSpec a;
  a.lane = get_field<LaneId>(j, "lane");
  a.offset_ahead = get_field_or<double>(j, "offset_ahead", a.offset_ahead);
  a.ghost_speed = get_field_or<double>(j, "ghost_speed", a.ghost_speed);
  a.start_t = get_field<double>(j, "start_t");
  a.duration = get_field<double>(j, "duration");
  a.mode = parse_ghost_mode(get_field_or<std::string>(j, "mode", "perception"));
  if (!(a.duration >= 0.0) || !(a.ghost_speed >= 0.0)) throw ConfigError("attack duration and ghost speed must be >= 0");
  return a;
}

// Ground truth of one injected participant.
struct GhostLabel {
  ParticipantId ghost = 0;
  ParticipantId victim = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

namespace detail {

// Arrival times of one stream in [0, duration): explicit times first, then Poisson arrivals.
inline std::vector<double> arrivals(std::mt19937_64& rng, double per_hour, const std::vector<double>& times,
                                    double duration) {
  std::vector<double> out;
  for (double t : times) {
    if (t >= 0.0 && t < duration) out.push_back(t);
  }
  if (per_hour > 0.0) {
    std::exponential_distribution<double> gap(per_hour / 3600.0);
    for (double t = gap(rng); t < duration; t += gap(rng)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t kind, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

}  // namespace detail

// The built-in traffic model: signalised network, Poisson demand, virtual drivers, signal-aware
// pedestrians and optional ghost injection. Each demand stream owns its RNG, so two runs with
// the same seed see identical arrivals and per-agent draws whatever the signal program does.
class World : public cosim::Model {
 public:
  explicit World(ScenarioConfig cfg, std::optional<AttackSpec> attack = std::nullopt)
      : cfg_(std::move(cfg)), attack_(attack) {
    if (!cfg_.program.empty()) {
      controller_ = std::make_unique<signals::SignalController>(cfg_.programs.at(cfg_.program), cfg_.network);
    }
    for (std::size_t i = 0; i < cfg_.vehicles.size(); ++i) {
      const auto& vs = cfg_.vehicles[i];
      VehicleSource src;
      src.routes = enumerate_routes(cfg_.network, vs.lane);
      src.lane_length = Polyline(cfg_.network.find_lane(vs.lane)->centerline).length();
      auto rng = detail::stream_rng(cfg_.seed, 1, i);
      for (double t : detail::arrivals(rng, vs.per_hour, vs.times, cfg_.duration)) {
        behavior::DriverParams p = cfg_.driver;
        p.xi = behavior::draw_xi(rng);
        const std::size_t route = std::uniform_int_distribution<std::size_t>(0, src.routes.size() - 1)(rng);
        src.pending.push_back({t, p, route});
      }
      vsources_.push_back(std::move(src));
    }
    for (std::size_t i = 0; i < cfg_.pedestrians.size(); ++i) {
      const auto& ps = cfg_.pedestrians[i];
      PedSource src;
      src.path = Polyline(ps.path);
      for (const auto& cp : ps.crossings) src.crossings.push_back({src.path.station(cp.waypoint), cp.group});
      std::sort(src.crossings.begin(), src.crossings.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
      auto rng = detail::stream_rng(cfg_.seed, 2, i);
      std::uniform_real_distribution<double> speed(ps.walk_speed_min, ps.walk_speed_max);
      for (double t : detail::arrivals(rng, ps.per_hour, ps.times, cfg_.duration)) src.pending.push_back({t, speed(rng)});
      psources_.push_back(std::move(src));
    }
  }

  // --- cosim::Model ---------------------------------------------------------------------

  std::vector<ParticipantState> initial_participants(double) override { return {}; }

  std::vector<ParticipantState> propose(const cosim::Frame& prior, double dt) override {
    const double t = prior.sim_time;
    const double t_next = t + dt;
    update_signals(t);
    update_attack(t);

    std::vector<ParticipantState> out;
    step_vehicles(prior, t, dt, out);
    step_pedestrians(t, dt, out);
    step_ghosts(t_next, dt, out);
    for (auto& [id, s] : foreign_) {
      s = cosim::dead_reckon(s, dt);
      s.timestamp = t_next;
      if (s.source == Source::external_client) s.source = Source::simulated;
      out.push_back(s);
    }
    spawn(t_next, out);
    return out;
  }

  void adopt(const ParticipantState& s) override {
    if (auto it = vehicles_.find(s.id); it != vehicles_.end()) {
      auto& v = it->second;
      const auto& path = route_of(v).path;
      v.kin.s = path.project(s.position, std::max(0.0, v.kin.s - 50.0), v.kin.s + 50.0).s;
      v.kin.state = s;
      return;
    }
    if (auto it = peds_.find(s.id); it != peds_.end()) {
      auto& p = it->second;
      p.s = psources_[p.source].path.project(s.position, std::max(0.0, p.s - 20.0), p.s + 20.0).s;
      return;
    }
    if (auto it = foreign_.find(s.id); it != foreign_.end()) it->second = s;
  }

  void admit(const ParticipantState& s) override {
    foreign_[s.id] = s;
    next_id_ = std::max(next_id_, s.id + 1);
  }

  void remove(ParticipantId id) override {
    vehicles_.erase(id);
    peds_.erase(id);
    foreign_.erase(id);
    ghosts_.erase(id);
  }

  std::map<std::string, std::string> signals(double t) override {
    std::map<std::string, std::string> out;
    if (!controller_) return out;
    controller_->advance_to(t);
    for (std::size_t g = 0; g < controller_->groups().size(); ++g) {
      out[controller_->groups()[g]] = std::string(signals::to_string(controller_->state(g, t)));
    }
    return out;
  }

  ParticipantId allocate_id() override { return next_id_++; }

  // --- evaluation -----------------------------------------------------------------------

  const std::vector<signals::LostTimeRecord>& lost_times() const { return lost_; }
  const std::vector<GhostLabel>& ghost_labels() const { return labels_; }
  bool is_spoofed(ParticipantId id) const {
    return std::any_of(labels_.begin(), labels_.end(), [&](const GhostLabel& l) { return l.ghost == id; });
  }
  const ScenarioConfig& config() const { return cfg_; }
  const signals::SignalController* controller() const { return controller_.get(); }
  std::size_t spawned_vehicles() const { return spawned_vehicles_; }
  std::size_t spawned_pedestrians() const { return spawned_peds_; }

 private:
  struct PendingVehicle {
    double t = 0.0;
    behavior::DriverParams params;
    std::size_t route = 0;
  };
  struct VehicleSource {
    std::vector<Route> routes;
    double lane_length = 0.0;
    std::deque<PendingVehicle> pending;
  };
  struct VehicleAgent {
    std::size_t source = 0;
    std::size_t route = 0;
    behavior::LaneKinematics kin;
    behavior::DriverParams params;
    double v_set = 0.0;
    double t_scheduled = 0.0;
    double s_entry = 0.0;
    std::set<std::size_t> committed;  // stop lines it passes regardless of red
  };
  struct Crossing {
    double s = 0.0;
    GroupId group;
  };
  struct PendingPed {
    double t = 0.0;
    double walk_speed = 1.3;
  };
  struct PedSource {
    Polyline path;
    std::vector<Crossing> crossings;
    std::deque<PendingPed> pending;
  };
  struct PedAgent {
    std::size_t source = 0;
    double s = 0.0;
    double walk_speed = 1.3;
    double t_scheduled = 0.0;
  };
  struct GhostAgent {
    std::size_t vsource = 0;
    std::size_t route = 0;
    ParticipantId victim = 0;
    double s = 0.0;
    double speed = 0.0;
    double t_end = 0.0;
    GhostMode mode = GhostMode::perception;
  };

  const Route& route_of(const VehicleAgent& v) const { return vsources_[v.source].routes[v.route]; }

  bool red(const GroupId& g, double t) const {
    return controller_ && controller_->state(controller_->index_of(g), t) == signals::LightState::red;
  }

  // VRU calls first, then detector actuation, both evaluated on the state at t.
  void update_signals(double t) {
    if (!controller_) return;
    controller_->advance_to(t);
    if (++prune_counter_ % 1000 == 0) controller_->prune_before(t - controller_->program().cycle);
    for (const auto& [id, p] : peds_) {
      const auto& src = psources_[p.source];
      for (const auto& c : src.crossings) {
        if (std::abs(p.s - c.s) < 1e-9 && red(c.group, t)) controller_->request_vru(c.group, t);
      }
    }
    std::map<GroupId, bool> occupancy;
    for (const auto& [id, v] : vehicles_) {
      const auto& r = route_of(v);
      for (const auto& line : r.stop_lines) {
        const double ahead = line.s - v.kin.s;
        bool& occ = occupancy[line.group];
        if (ahead >= 0.0 && ahead <= cfg_.detector_range) occ = true;
      }
    }
    controller_->actuated_step(occupancy, t);
  }

  void update_attack(double t) {
    if (!attack_ || attack_fired_ || t < attack_->start_t - 1e-9) return;  // accumulated clock drift
    attack_fired_ = true;
    if (!(attack_->duration > 0.0)) return;
    const VehicleAgent* victim = nullptr;
    ParticipantId victim_id = 0;
    for (const auto& [id, v] : vehicles_) {
      const auto& src = vsources_[v.source];
      if (cfg_.vehicles[v.source].lane != attack_->lane || v.kin.s >= src.lane_length) continue;
      if (!victim || v.kin.s > victim->kin.s) {
        victim = &v;
        victim_id = id;
      }
    }
    if (!victim) throw NoVictim("no vehicle on lane " + std::to_string(attack_->lane) + " at t=" + std::to_string(t));
    GhostAgent g;
    g.vsource = victim->source;
    g.route = victim->route;
    g.victim = victim_id;
    g.s = victim->kin.s + attack_->offset_ahead;
    g.speed = attack_->ghost_speed;
    g.t_end = attack_->start_t + attack_->duration;
    g.mode = attack_->mode;
    const ParticipantId id = kGhostIdBase + next_ghost_++;
    ghosts_[id] = g;
    labels_.push_back({id, victim_id, attack_->start_t, g.t_end});
  }

  void step_vehicles(const cosim::Frame& prior, double t, double dt, std::vector<ParticipantState>& out) {
    std::vector<ParticipantId> exited;
    std::vector<ParticipantState> nearby;
    std::vector<StopLine> red_lines;
    for (auto& [id, v] : vehicles_) {
      const Route& r = route_of(v);
      const auto& ego = v.kin.state;
      nearby.clear();
      for (const auto& o : prior.participants) {
        if (o.id == id || distance_xy(o.position, ego.position) > cfg_.tuning.lookahead_m + 20.0) continue;
        if (auto g = ghosts_.find(o.id); g != ghosts_.end() && g->second.mode == GhostMode::v2x_only && g->second.victim != id) {
          continue;
        }
        nearby.push_back(o);
      }
      red_lines.clear();
      const double half = ego.dimensions.length / 2.0;
      for (std::size_t k = 0; k < r.stop_lines.size(); ++k) {
        const auto& line = r.stop_lines[k];
        if (!red(line.group, t) || v.committed.count(k)) continue;
        const double d = line.s - v.kin.s - half;
        if (d < 0.0) continue;
        // Too close to stop even at full braking: clear the junction instead.
        if (d < ego.speed * ego.speed / (2.0 * v.params.a_b)) {
          v.committed.insert(k);
          continue;
        }
        red_lines.push_back(line);
      }
      const auto scan = behavior::obstacle_scan(ego, v.kin.s, r.path, nearby, red_lines, cfg_.tuning);
      const double v_target =
          scan ? behavior::target_velocity(v.v_set, v.params.a_b, scan->observation, cfg_.tuning.lerp_norm_m) : v.v_set;
      v.kin = behavior::step_vehicle(v.kin, behavior::pedal(v_target, ego.speed), v.params, dt, r.path);
      v.kin.state.timestamp = t + dt;
      v.kin.state.source = Source::simulated;
      if (v.kin.s >= r.path.length() - half) {
        const signals::TrajectorySample tr[2] = {{v.t_scheduled, v.s_entry}, {t + dt, v.kin.s}};
        lost_.push_back(signals::lost_time(tr, v.v_set, id, ego.cls));
        exited.push_back(id);
        continue;
      }
      out.push_back(v.kin.state);
    }
    for (auto id : exited) vehicles_.erase(id);
  }

  void step_pedestrians(double t, double dt, std::vector<ParticipantState>& out) {
    std::vector<ParticipantId> exited;
    for (auto& [id, p] : peds_) {
      const auto& src = psources_[p.source];
      double s_new = p.s + p.walk_speed * dt;
      for (const auto& c : src.crossings) {
        if (p.s <= c.s + 1e-9 && s_new > c.s && red(c.group, t)) {
          s_new = c.s;
          break;
        }
      }
      const double moved = s_new - p.s;
      p.s = s_new;
      if (p.s >= src.path.length()) {
        const signals::TrajectorySample tr[2] = {{p.t_scheduled, 0.0}, {t + dt, src.path.length()}};
        lost_.push_back(signals::lost_time(tr, p.walk_speed, id, ParticipantClass::pedestrian));
        exited.push_back(id);
        continue;
      }
      out.push_back(ped_state(id, p, t + dt, moved / dt));
    }
    for (auto id : exited) peds_.erase(id);
  }

  ParticipantState ped_state(ParticipantId id, const PedAgent& p, double t, double speed) const {
    const PathPose pose = psources_[p.source].path.at(p.s);
    ParticipantState s;
    s.id = id;
    s.timestamp = t;
    s.cls = ParticipantClass::pedestrian;
    s.position = pose.position;
    s.yaw = normalize_yaw(pose.yaw);
    s.speed = speed;
    s.dimensions = default_dimensions(ParticipantClass::pedestrian);
    s.source = Source::simulated;
    return s;
  }

  void step_ghosts(double t_next, double dt, std::vector<ParticipantState>& out) {
    std::vector<ParticipantId> done;
    for (auto& [id, g] : ghosts_) {
      if (t_next > g.t_end + 1e-9) {
        done.push_back(id);
        continue;
      }
      // Spawned at t, the ghost first appears in the frame at t_next already advanced.
      g.s += g.speed * dt;
      const auto& path = vsources_[g.vsource].routes[g.route].path;
      const PathPose pose = path.at(g.s);
      ParticipantState s;
      s.id = id;
      s.timestamp = t_next;
      s.cls = ParticipantClass::car;
      s.position = pose.position;
      s.yaw = normalize_yaw(pose.yaw);
      s.speed = g.speed;
      s.dimensions = default_dimensions(ParticipantClass::car);
      s.source = Source::v2x;
      out.push_back(s);
    }
    for (auto id : done) ghosts_.erase(id);
  }

  void spawn(double t_next, std::vector<ParticipantState>& out) {
    for (std::size_t i = 0; i < vsources_.size(); ++i) {
      auto& src = vsources_[i];
      while (!src.pending.empty() && src.pending.front().t <= t_next) {
        const PendingVehicle pv = src.pending.front();
        const ParticipantClass cls = cfg_.vehicles[i].cls;
        const Dimensions dims = default_dimensions(cls);
        const Route& r = src.routes[pv.route];
        const double s0 = dims.length / 2.0;
        // Room to the last vehicle that entered from this lane.
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& [id, v] : vehicles_) {
          if (v.source != i) continue;
          gap = std::min(gap, v.kin.s - v.kin.state.dimensions.length / 2.0 - dims.length - cfg_.tuning.d_margin);
        }
        if (gap < 0.0) break;  // queue outside the modelled area
        const double v_set = behavior::draw_set_speed(pv.params);
        VehicleAgent a;
        a.source = i;
        a.route = pv.route;
        a.params = pv.params;
        a.v_set = v_set;
        a.t_scheduled = pv.t;
        a.s_entry = s0;
        a.kin.s = s0;
        auto& st = a.kin.state;
        st.id = allocate_id();
        st.timestamp = t_next;
        st.cls = cls;
        const PathPose pose = r.path.at(s0);
        st.position = pose.position;
        st.yaw = normalize_yaw(pose.yaw);
        // Enter no faster than allows stopping within half the free gap.
        st.speed = std::min(v_set, std::sqrt(behavior::planned_deceleration(pv.params.a_b) * gap));
        st.dimensions = dims;
        st.source = Source::simulated;
        out.push_back(st);
        vehicles_.emplace(st.id, std::move(a));
        src.pending.pop_front();
        ++spawned_vehicles_;
      }
    }
    for (std::size_t i = 0; i < psources_.size(); ++i) {
      auto& src = psources_[i];
      while (!src.pending.empty() && src.pending.front().t <= t_next) {
        const PendingPed pp = src.pending.front();
        src.pending.pop_front();
        PedAgent p{i, 0.0, pp.walk_speed, pp.t};
        const ParticipantId id = allocate_id();
        out.push_back(ped_state(id, p, t_next, 0.0));
        peds_.emplace(id, p);
        ++spawned_peds_;
      }
    }
  }

  ScenarioConfig cfg_;
  std::optional<AttackSpec> attack_;
  bool attack_fired_ = false;
  std::unique_ptr<signals::SignalController> controller_;
  std::vector<VehicleSource> vsources_;
  std::vector<PedSource> psources_;
  std::map<ParticipantId, VehicleAgent> vehicles_;
  std::map<ParticipantId, PedAgent> peds_;
  std::map<ParticipantId, GhostAgent> ghosts_;
  std::map<ParticipantId, ParticipantState> foreign_;
  std::vector<signals::LostTimeRecord> lost_;
  std::vector<GhostLabel> labels_;
  ParticipantId next_id_ = 1;
  // Ghosts draw from a disjoint range so an attack never renumbers genuine participants.
  static constexpr ParticipantId kGhostIdBase = ParticipantId{1} << 40;
  ParticipantId next_ghost_ = 0;
  std::size_t spawned_vehicles_ = 0;
  std::size_t spawned_peds_ = 0;
  std::size_t prune_counter_ = 0;
};

}  // namespace taftwin::scenario
