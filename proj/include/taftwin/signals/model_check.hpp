#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "taftwin/signals/controller.hpp"

namespace taftwin::signals {

struct ModelCheckOptions {
  double dt = 0.1;
  double horizon = 0.0;       // 0 means two cycles
  bool vru_calls = true;      // branch on VRU requests (vru_optimized mode only)
  std::size_t max_states = 2'000'000;
};

struct ModelCheckReport {
  std::size_t steps = 0;
  std::size_t states_explored = 0;  // distinct controller states summed over all steps
  std::size_t max_frontier = 0;
  bool truncated = false;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty() && !truncated; }
};

namespace detail {

struct KeyHash {
  std::size_t operator()(const std::vector<double>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (double d : v) {
      h ^= std::hash<double>{}(d);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline void check_plan(const SignalController& c, double eps, std::vector<std::string>& out) {
  const auto& p = c.program();
  const std::size_t n = c.groups().size();
  for (std::size_t g = 0; g < n; ++g) {
    for (const auto& iv : c.plan(g)) {
      if (iv.duration() + eps < p.min_green) {
        out.push_back("green of " + c.groups()[g] + " at " + std::to_string(iv.start) + " lasts " +
                      std::to_string(iv.duration()) + " s < min_green");
      }
    }
    for (std::size_t h = 0; h < n; ++h) {
      if (!c.conflicting(g, h)) continue;
      for (const auto& a : c.plan(g)) {
        for (const auto& b : c.plan(h)) {
          if (b.start < a.start) continue;
          if (a.end + c.intergreen(g, h) > b.start + eps) {
            out.push_back("intergreen " + c.groups()[g] + " -> " + c.groups()[h] + " at " + std::to_string(a.end) +
                          " is " + std::to_string(b.start - a.end) + " s");
          }
        }
      }
    }
  }
}

}  // namespace detail

// Exhaustive exploration of controller behaviour at a fixed step. At every step each vehicle
// group that is green and inside its gap window may see its detector occupied or clear, and
// each red VRU group may or may not place a call. States with identical futures are merged.
// Checked: no two conflicting groups green at the same instant, every green >= min_green,
// every conflicting red-to-green gap >= intergreen.
inline ModelCheckReport model_check(const SignalProgram& program, const RoadNetwork& net,
                                    const ModelCheckOptions& opt = {}) {
  ModelCheckReport rep;
  const double horizon = opt.horizon > 0.0 ? opt.horizon : 2.0 * program.cycle;
  const double eps = 1e-6;
  std::vector<SignalController> frontier{SignalController(program, net)};
  detail::check_plan(frontier.front(), eps, rep.violations);
  const std::size_t n = frontier.front().groups().size();

  const auto steps = static_cast<std::size_t>(std::llround(horizon / opt.dt));
  for (std::size_t k = 0; k <= steps && rep.violations.empty(); ++k) {
    const double t = static_cast<double>(k) * opt.dt;
    std::vector<SignalController> next;
    std::unordered_set<std::vector<double>, detail::KeyHash> seen;

    for (const auto& c : frontier) {
      // Simultaneous conflicting greens.
      for (std::size_t a = 0; a < n; ++a) {
        if (c.state(a, t) != LightState::green) continue;
        for (std::size_t b = a + 1; b < n; ++b) {
          if (c.conflicting(a, b) && c.state(b, t) == LightState::green) {
            rep.violations.push_back("conflicting groups " + c.groups()[a] + " and " + c.groups()[b] +
                                     " green at t=" + std::to_string(t));
          }
        }
      }

      std::vector<std::size_t> detectors;
      std::vector<std::size_t> callers;
      for (std::size_t g = 0; g < n; ++g) {
        if (c.is_vru_group(g)) {
          if (opt.vru_calls && program.mode == SignalMode::vru_optimized && c.state(g, t) == LightState::red) {
            callers.push_back(g);
          }
        } else if (program.mode != SignalMode::fixed && c.state(g, t) == LightState::green &&
                   c.time_to_change(g, t) <= program.gap_time) {
          detectors.push_back(g);
        }
      }
      // Detector outcomes first, then VRU calls one group at a time. A call that leaves the
      // controller unchanged yields the same child as no call, so that branch is dropped.
      auto emit = [&](SignalController child, bool mutated) {
        child.advance_to(t + opt.dt);
        child.prune_before(t);
        if (!seen.insert(child.future_key(t + opt.dt)).second) return;
        if (mutated) detail::check_plan(child, eps, rep.violations);
        next.push_back(std::move(child));
      };
      std::function<void(SignalController&, std::size_t, bool)> calls = [&](SignalController& cur, std::size_t i,
                                                                             bool mutated) {
        if (i == callers.size()) {
          emit(cur, mutated);
          return;
        }
        calls(cur, i + 1, mutated);
        SignalController with = cur;
        if (with.request_vru(c.groups()[callers[i]], t)) calls(with, i + 1, true);
      };
      const std::size_t choices = std::size_t{1} << detectors.size();
      for (std::size_t mask = 0; mask < choices; ++mask) {
        SignalController child = c;
        bool mutated = false;
        std::map<GroupId, bool> occ;
        for (std::size_t i = 0; i < detectors.size(); ++i) occ[c.groups()[detectors[i]]] = (mask >> i) & 1u;
        if (!occ.empty()) {
          const auto before = child.future_key(t);
          child.actuated_step(occ, t);
          mutated = child.future_key(t) != before;
        }
        calls(child, 0, mutated);
      }
    }
    rep.steps = k + 1;
    rep.states_explored += next.size();
    rep.max_frontier = std::max(rep.max_frontier, next.size());
    if (rep.states_explored > opt.max_states) {
      rep.truncated = true;
      break;
    }
    frontier = std::move(next);
  }
  return rep;
}

}  // namespace taftwin::signals
