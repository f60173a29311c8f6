#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "taftwin/signals/program.hpp"

namespace taftwin::signals {

// Runs a signal program in absolute time. Greens are materialised per cycle from the
// program and may then be stretched by detector actuation or, in vru_optimized mode,
// supplemented by short VRU greens. Every change is admitted only if it keeps min-green,
// max-green and the intergreen to all conflicting groups, so safety holds by construction.
class SignalController {
 public:
  SignalController(SignalProgram program, const RoadNetwork& net) : program_(std::move(program)) {
    validate_program(program_, net);
    const auto greens = effective_greens(program_);
    for (const auto& g : net.signal_groups) {
      index_[g.id] = ids_.size();
      ids_.push_back(g.id);
      vru_.push_back(g.vru);
      auto it = greens.find(g.id);
      base_.push_back(it == greens.end() ? std::vector<GreenInterval>{} : it->second);
    }
    const std::size_t n = ids_.size();
    conflict_.assign(n, std::vector<bool>(n, false));
    intergreen_.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        conflict_[a][b] = conflicts(net, ids_[a], ids_[b]);
        intergreen_[a][b] = program_.intergreen_between(ids_[a], ids_[b]);
      }
    }
    for (const auto& pc : program_.progressive) {
      partners_.push_back({index_of(pc.first), index_of(pc.second),
                           progressive_crossing_offset(pc.island_distance, pc.walk_speed)});
    }
    plan_.assign(n, {});
    materialise_through(2);
  }

  const SignalProgram& program() const { return program_; }
  const std::vector<GroupId>& groups() const { return ids_; }
  std::size_t index_of(const GroupId& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) throw UnknownGroup(g);
    return it->second;
  }
  bool is_vru_group(std::size_t g) const { return vru_[g]; }
  bool conflicting(std::size_t a, std::size_t b) const { return conflict_[a][b]; }
  double intergreen(std::size_t from, std::size_t to) const { return intergreen_[from][to]; }

  // Keeps two cycles beyond the one containing t materialised.
  void advance_to(double t) {
    const auto k = static_cast<long>(std::floor(t / program_.cycle));
    materialise_through(k + 2);
  }

  LightState state(std::size_t g, double t) const {
    return green_interval(g, t) ? LightState::green : LightState::red;
  }
  LightState state(const GroupId& g, double t) const { return state(index_of(g), t); }

  // Seconds until the state of g changes (for SPaT).
  double time_to_change(std::size_t g, double t) const {
    if (const GreenInterval* iv = green_interval(g, t)) return iv->end - t;
    for (const auto& iv : plan_[g]) {
      if (iv.start > t) return iv.start - t;
    }
    return std::numeric_limits<double>::infinity();
  }

  // Gap-out extension: a green whose detector is occupied within gap_time of its end is
  // pushed to t + gap_time, capped by max_green and by the next conflicting green.
  // Returns the current green end per group that is green at t.
  std::map<GroupId, double> actuated_step(const std::map<GroupId, bool>& occupancy, double t) {
    std::map<GroupId, double> ends;
    advance_to(t);
    for (const auto& [gid, occupied] : occupancy) {
      const std::size_t g = index_of(gid);
      GreenInterval* iv = green_interval(g, t);
      if (!iv) continue;
      if (occupied && program_.mode != SignalMode::fixed && iv->end - t <= program_.gap_time) {
        double new_end = std::min(t + program_.gap_time, iv->start + program_.max_green);
        new_end = std::min(new_end, latest_feasible_end(g, *iv));
        if (new_end > iv->end) iv->end = new_end;
      }
      ends[gid] = iv->end;
    }
    return ends;
  }

  // VRU priority: a waiting VRU gets the earliest feasible short green instead of waiting for
  // the next planned one. Only active in vru_optimized mode. Returns true if a green was added.
  bool request_vru(const GroupId& gid, double t) {
    if (program_.mode != SignalMode::vru_optimized) return false;
    advance_to(t);
    const std::size_t g = index_of(gid);
    if (green_interval(g, t)) return false;
    const GreenInterval* next = next_interval(g, t);
    if (!next) return false;
    const double next_start = next->start;
    const double len = program_.min_green;

    std::vector<double> candidates{t};
    for (std::size_t c = 0; c < ids_.size(); ++c) {
      if (!conflict_[g][c]) continue;
      for (const auto& iv : plan_[c]) {
        const double s = iv.end + intergreen_[c][g];
        if (s > t && s < next_start) candidates.push_back(s);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (double ts : candidates) {
      const GreenInterval own{ts, ts + len};
      if (own.end > next_start) break;
      if (!feasible(g, own)) continue;
      std::vector<std::pair<std::size_t, GreenInterval>> partner_greens;
      bool ok = true;
      for (const auto& p : partners_) {
        if (p.first != g) continue;
        const GreenInterval shifted{own.start + p.offset, own.end + p.offset};
        if (covered(p.second, shifted)) continue;
        GreenInterval merged = merged_with_own(p.second, shifted);
        if (!feasible(p.second, merged)) {
          ok = false;
          break;
        }
        partner_greens.push_back({p.second, shifted});
      }
      if (!ok) continue;
      insert(g, own);
      for (const auto& [pg, iv] : partner_greens) insert(pg, iv);
      return true;
    }
    return false;
  }

  const std::vector<GreenInterval>& plan(std::size_t g) const { return plan_[g]; }

  // Compact description of everything that can still influence the future after t.
  std::vector<double> future_key(double t) const {
    std::vector<double> key;
    for (std::size_t g = 0; g < plan_.size(); ++g) {
      key.push_back(-1.0);
      for (const auto& iv : plan_[g]) {
        // the max intergreen window keeps recently ended greens relevant
        if (iv.end + max_intergreen() <= t) continue;
        key.push_back(std::round(iv.start * 1e6) / 1e6);
        key.push_back(std::round(iv.end * 1e6) / 1e6);
      }
    }
    return key;
  }

  // Drops greens that ended long before t; keeps plans bounded in long runs.
  void prune_before(double t) {
    for (auto& p : plan_) {
      std::erase_if(p, [&](const GreenInterval& iv) { return iv.end + program_.cycle < t; });
    }
  }

 private:
  struct Partner {
    std::size_t first;
    std::size_t second;
    double offset;
  };

  double max_intergreen() const {
    double m = 0.0;
    for (const auto& row : intergreen_) {
      for (double v : row) m = std::max(m, v);
    }
    return m;
  }

  void materialise_through(long cycle_index) {
    while (materialised_ <= cycle_index) {
      const double offset = static_cast<double>(materialised_) * program_.cycle;
      for (std::size_t g = 0; g < base_.size(); ++g) {
        for (const auto& iv : base_[g]) insert(g, {iv.start + offset, iv.end + offset});
      }
      ++materialised_;
    }
  }

  void insert(std::size_t g, GreenInterval iv) { detail::add_covering(plan_[g], iv); }

  GreenInterval* green_interval(std::size_t g, double t) {
    for (auto& iv : plan_[g]) {
      if (t >= iv.start && t < iv.end) return &iv;
    }
    return nullptr;
  }
  const GreenInterval* green_interval(std::size_t g, double t) const {
    for (const auto& iv : plan_[g]) {
      if (t >= iv.start && t < iv.end) return &iv;
    }
    return nullptr;
  }
  const GreenInterval* next_interval(std::size_t g, double t) const {
    for (const auto& iv : plan_[g]) {
      if (iv.start > t) return &iv;
    }
    return nullptr;
  }

  bool covered(std::size_t g, const GreenInterval& iv) const {
    return std::any_of(plan_[g].begin(), plan_[g].end(),
                       [&](const GreenInterval& p) { return p.start <= iv.start && p.end >= iv.end; });
  }

  GreenInterval merged_with_own(std::size_t g, GreenInterval iv) const {
    for (const auto& p : plan_[g]) {
      if (!(p.end < iv.start || p.start > iv.end)) {
        iv.start = std::min(iv.start, p.start);
        iv.end = std::max(iv.end, p.end);
      }
    }
    return iv;
  }

  // Latest end for interval iv of g that keeps the intergreen to every later conflicting green
  // and does not run into the group's own next green.
  double latest_feasible_end(std::size_t g, const GreenInterval& iv) const {
    double limit = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < plan_.size(); ++c) {
      if (!conflict_[g][c]) continue;
      for (const auto& other : plan_[c]) {
        if (other.start >= iv.end) limit = std::min(limit, other.start - intergreen_[g][c]);
      }
    }
    for (const auto& own : plan_[g]) {
      if (own.start > iv.start) limit = std::min(limit, own.start);
    }
    return limit;
  }

  bool feasible(std::size_t g, const GreenInterval& iv) const {
    for (std::size_t c = 0; c < plan_.size(); ++c) {
      if (!conflict_[g][c]) continue;
      for (const auto& other : plan_[c]) {
        const bool before = iv.end + intergreen_[g][c] <= other.start + 1e-9;
        const bool after = other.end + intergreen_[c][g] <= iv.start + 1e-9;
        if (!before && !after) return false;
      }
    }
    return true;
  }

  SignalProgram program_;
  std::map<GroupId, std::size_t> index_;
  std::vector<GroupId> ids_;
  std::vector<bool> vru_;
  std::vector<std::vector<GreenInterval>> base_;
  std::vector<std::vector<bool>> conflict_;
  std::vector<std::vector<double>> intergreen_;
  std::vector<Partner> partners_;
  std::vector<std::vector<GreenInterval>> plan_;
  long materialised_ = 0;
};

}  // namespace taftwin::signals
