#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taftwin/cosim/message.hpp"

namespace taftwin::cosim {

// Complete simulation state at one instant: what a FRAME broadcasts.
struct Frame {
  std::uint64_t frame_no = 0;
  double sim_time = 0.0;
  std::vector<ParticipantState> participants;  // sorted by id
  std::map<std::string, std::string> signals;  // group -> "red" | "green"

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline FrameMessage to_message(const Frame& f) {
  FrameMessage m;
  m.kind = MessageKind::frame;
  m.frame_no = f.frame_no;
  m.sim_time = f.sim_time;
  m.participants = f.participants;
  m.signals = f.signals;
  return m;
}

inline Frame to_frame(const FrameMessage& m) {
  if (m.kind != MessageKind::frame) throw PreconditionError("not a FRAME message");
  return {m.frame_no, m.sim_time, m.participants, m.signals};
}

// The kernel's internal behaviour models. `propose` advances every participant that should
// exist at prior.sim_time + dt, reading only the prior frame and the model's own state.
// `adopt` tells the model that an external state replaced its proposal for that id.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::vector<ParticipantState> initial_participants(double t0) = 0;
  virtual std::vector<ParticipantState> propose(const Frame& prior, double dt) = 0;
  virtual void adopt(const ParticipantState& state) = 0;
  // A participant introduced by a client; the model keeps it alive as fallback.
  virtual void admit(const ParticipantState& state) = 0;
  virtual void remove(ParticipantId id) = 0;
  virtual std::map<std::string, std::string> signals(double t) = 0;
  virtual ParticipantId allocate_id() = 0;
};

// Constant-velocity, constant-turn-rate extrapolation of every participant it is told about.
inline ParticipantState dead_reckon(const ParticipantState& s, double dt) {
  ParticipantState n = s;
  n.position.x += s.speed * std::cos(s.yaw) * dt;
  n.position.y += s.speed * std::sin(s.yaw) * dt;
  n.yaw = normalize_yaw(s.yaw + s.yaw_rate * dt);
  n.timestamp = s.timestamp + dt;
  return n;
}

class DeadReckoningModel : public Model {
 public:
  DeadReckoningModel() = default;
  explicit DeadReckoningModel(std::vector<ParticipantState> initial) : initial_(std::move(initial)) {
    for (const auto& s : initial_) next_id_ = std::max(next_id_, s.id + 1);
  }

  std::vector<ParticipantState> initial_participants(double t0) override {
    auto out = initial_;
    for (auto& s : out) s.timestamp = t0;
    return out;
  }

  std::vector<ParticipantState> propose(const Frame& prior, double dt) override {
    std::vector<ParticipantState> out;
    for (const auto& s : prior.participants) {
      if (removed_.count(s.id)) continue;
      auto n = dead_reckon(s, dt);
      n.timestamp = prior.sim_time + dt;
      if (n.source == Source::external_client) n.source = Source::simulated;  // kernel fallback
      out.push_back(n);
    }
    for (const auto& s : pending_) {
      auto n = s;
      n.timestamp = prior.sim_time + dt;
      out.push_back(n);
    }
    pending_.clear();
    removed_.clear();
    return out;
  }

  void adopt(const ParticipantState&) override {}
  void admit(const ParticipantState& s) override {
    pending_.push_back(s);
    next_id_ = std::max(next_id_, s.id + 1);
  }
  void remove(ParticipantId id) override { removed_.insert(id); }
  std::map<std::string, std::string> signals(double) override { return {}; }
  ParticipantId allocate_id() override { return next_id_++; }

 private:
  std::vector<ParticipantState> initial_;
  std::vector<ParticipantState> pending_;
  std::set<ParticipantId> removed_;
  ParticipantId next_id_ = 1;
};

}  // namespace taftwin::cosim
