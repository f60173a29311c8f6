#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taftwin/cosim/model.hpp"
#include "taftwin/cosim/ownership.hpp"

namespace taftwin::cosim {

// A validated message as it left a connection's reader. `connection` names the transport
// endpoint; the kernel binds it to a client id at HELLO.
struct InboundMessage {
  std::string connection;
  FrameMessage message;
  friend bool operator==(const InboundMessage&, const InboundMessage&) = default;
};

struct OutboundMessage {
  std::string connection;
  FrameMessage message;
};

struct KernelCounters {
  std::size_t stale_updates = 0;
  std::size_t ownership_violations = 0;
  std::size_t invalid_states = 0;
  std::size_t accepted_states = 0;
  friend bool operator==(const KernelCounters&, const KernelCounters&) = default;
};

struct ClientInfo {
  std::string client_id;
  std::string connection;
  std::string name;
  bool lockstep = true;
  std::vector<ParticipantId> spawned;
  std::uint64_t joined_frame = 0;  // first FRAME the client is expected to answer
};

struct TickReport {
  KernelCounters counters;  // this tick only
  std::vector<OutboundMessage> outbox;
  std::vector<std::string> lagging;  // lockstep clients that sent neither UPDATE nor ACK
  std::vector<FrameMessage> controls;
};

// Single-owner frame state. Nothing outside `tick` mutates it, so replaying the same inbound
// trace against a fresh model yields the same frame sequence bit for bit.
class Kernel {
 public:
  Kernel(Model& model, double dt, double t0 = 0.0) : model_(&model), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    frame_.frame_no = 0;
    frame_.sim_time = t0;
    frame_.participants = model.initial_participants(t0);
    finalize(frame_);
    frame_.signals = model.signals(t0);
  }

  const Frame& current() const { return frame_; }
  double dt() const { return dt_; }
  const OwnershipTable& ownership() const { return owners_; }
  const std::map<std::string, ClientInfo>& clients() const { return clients_; }
  const KernelCounters& totals() const { return totals_; }

  std::optional<std::string> client_of(const std::string& connection) const {
    auto it = by_connection_.find(connection);
    if (it == by_connection_.end()) return std::nullopt;
    return it->second;
  }

  // Lockstep clients that must answer the current FRAME.
  std::vector<std::string> expected_connections() const {
    std::vector<std::string> out;
    for (const auto& [cid, c] : clients_) {
      if (c.lockstep && c.joined_frame <= frame_.frame_no) out.push_back(c.connection);
    }
    return out;
  }

  // Advances one frame. Messages are applied strictly in the order given, so an UPDATE sent
  // before a BYE still counts. Accepted states for owned ids replace the model's proposal.
  TickReport tick(const std::vector<InboundMessage>& inbound) {
    TickReport rep;
    const double t_next = frame_.sim_time + dt_;
    const std::uint64_t n_next = frame_.frame_no + 1;
    std::set<std::string> responders;

    std::map<ParticipantId, ParticipantState> accepted;
    for (const auto& in : inbound) {
      const auto& m = in.message;
      switch (m.kind) {
        case MessageKind::hello: handle_hello(in, rep); continue;
        case MessageKind::bye:
          // Updates already accepted for ids the client spawned die with it.
          for (ParticipantId id : handle_bye(in.connection)) accepted.erase(id);
          continue;
        case MessageKind::control: rep.controls.push_back(m); continue;
        case MessageKind::update:
        case MessageKind::ack: break;
        default: continue;
      }
      if (m.frame_no != frame_.frame_no) {
        ++rep.counters.stale_updates;
        continue;
      }
      const auto bound = client_of(in.connection);
      if (bound) responders.insert(*bound);
      if (m.kind == MessageKind::ack) continue;
      const std::string client = m.client_id.value_or(bound.value_or(""));
      const bool identity_ok = bound && client == *bound;
      for (auto s : m.participants) {
        if (!identity_ok || !owners_.owned_by(s.id, client)) {
          ++rep.counters.ownership_violations;
          continue;
        }
        s.yaw = std::isfinite(s.yaw) ? normalize_yaw(s.yaw) : s.yaw;
        s.timestamp = t_next;
        s.source = Source::external_client;
        if (!check_state(s).empty()) {
          ++rep.counters.invalid_states;
          continue;
        }
        accepted[s.id] = s;  // a client's later update for the same id supersedes its earlier one
      }
    }

    rep.counters.accepted_states = accepted.size();
    Frame next;
    next.frame_no = n_next;
    next.sim_time = t_next;
    next.participants = model_->propose(frame_, dt_);
    for (auto& s : next.participants) {
      auto it = accepted.find(s.id);
      if (it == accepted.end()) continue;
      s = it->second;
      model_->adopt(s);
      accepted.erase(it);
    }
    // Owned ids the model no longer proposes stay alive through their client's update.
    for (auto& [id, s] : accepted) {
      model_->adopt(s);
      next.participants.push_back(s);
    }
    finalize(next);
    next.signals = model_->signals(t_next);

    for (const auto& [cid, c] : clients_) {
      if (c.lockstep && c.joined_frame <= frame_.frame_no && !responders.count(cid)) rep.lagging.push_back(cid);
    }
    frame_ = std::move(next);
    totals_.stale_updates += rep.counters.stale_updates;
    totals_.ownership_violations += rep.counters.ownership_violations;
    totals_.invalid_states += rep.counters.invalid_states;
    totals_.accepted_states += rep.counters.accepted_states;
    return rep;
  }

 private:
  static void finalize(Frame& f) {
    std::sort(f.participants.begin(), f.participants.end(),
              [](const ParticipantState& a, const ParticipantState& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < f.participants.size(); ++i) {
      if (f.participants[i].id == f.participants[i - 1].id) {
        throw PreconditionError("duplicate participant id " + std::to_string(f.participants[i].id));
      }
    }
  }

  bool id_in_use(ParticipantId id) const {
    return std::any_of(frame_.participants.begin(), frame_.participants.end(),
                       [&](const ParticipantState& s) { return s.id == id; }) ||
           !owners_.owned_by_kernel(id) || reserved_.count(id);
  }

  void handle_hello(const InboundMessage& in, TickReport& rep) {
    if (by_connection_.count(in.connection)) return;  // repeated HELLO is ignored
    FrameMessage w;
    w.kind = MessageKind::welcome;
    w.frame_no = frame_.frame_no + 1;
    w.sim_time = frame_.sim_time + dt_;
    auto refuse = [&](const std::string& reason) {
      w.control = json{{"accepted", false}, {"reason", reason}, {"version", std::string(kProtocolVersion)}};
      rep.outbox.push_back({in.connection, w});
    };
    HelloRequest h;
    try {
      h = parse_hello(in.message);
    } catch (const Error& e) {
      return refuse(std::string("malformed HELLO: ") + e.what());
    }
    if (h.version != kProtocolVersion) return refuse("unsupported protocol version");
    ClientInfo c;
    c.client_id = "c" + std::to_string(++client_seq_);
    c.connection = in.connection;
    c.name = h.name;
    c.lockstep = h.lockstep;
    c.joined_frame = frame_.frame_no + 1;
    std::vector<ParticipantId> owned;
    std::vector<ParticipantId> rejected;
    for (ParticipantId id : h.claim_ids) {
      const bool exists = std::any_of(frame_.participants.begin(), frame_.participants.end(),
                                      [&](const ParticipantState& s) { return s.id == id; });
      if (exists && owners_.owned_by_kernel(id) && owners_.claim(id, c.client_id)) {
        owned.push_back(id);
      } else {
        rejected.push_back(id);
      }
    }
    for (auto s : h.spawn) {
      if (s.id == 0 || id_in_use(s.id)) s.id = model_->allocate_id();
      while (id_in_use(s.id)) s.id = model_->allocate_id();
      s.yaw = std::isfinite(s.yaw) ? normalize_yaw(s.yaw) : s.yaw;
      s.source = Source::external_client;
      if (!check_state(s).empty()) {
        ++rep.counters.invalid_states;
        continue;
      }
      owners_.claim(s.id, c.client_id);
      reserved_.insert(s.id);
      model_->admit(s);
      c.spawned.push_back(s.id);
      owned.push_back(s.id);
    }
    w.client_id = c.client_id;
    w.control = json{{"accepted", true},
                     {"version", std::string(kProtocolVersion)},
                     {"dt", dt_},
                     {"owned_ids", owned},
                     {"rejected_ids", rejected}};
    rep.outbox.push_back({in.connection, w});
    by_connection_[in.connection] = c.client_id;
    clients_[c.client_id] = std::move(c);
  }

  std::vector<ParticipantId> handle_bye(const std::string& connection) {
    auto it = by_connection_.find(connection);
    if (it == by_connection_.end()) return {};
    const ClientInfo& c = clients_.at(it->second);
    std::vector<ParticipantId> despawned = c.spawned;
    for (ParticipantId id : despawned) {
      model_->remove(id);
      reserved_.erase(id);
    }
    owners_.release_all(c.client_id);
    clients_.erase(it->second);
    by_connection_.erase(it);
    return despawned;
  }

  Model* model_;
  double dt_;
  Frame frame_;
  OwnershipTable owners_;
  std::map<std::string, ClientInfo> clients_;
  std::map<std::string, std::string> by_connection_;
  std::set<ParticipantId> reserved_;
  std::size_t client_seq_ = 0;
  KernelCounters totals_;
};

// Inbound messages per tick, in arrival order: everything needed to replay a session.
struct UpdateTrace {
  std::vector<std::vector<InboundMessage>> ticks;
  friend bool operator==(const UpdateTrace&, const UpdateTrace&) = default;
};

inline std::string encode_trace(const UpdateTrace& trace) {
  std::string out;
  for (std::size_t k = 0; k < trace.ticks.size(); ++k) {
    json inbound = json::array();
    for (const auto& in : trace.ticks[k]) {
      inbound.push_back(json{{"connection", in.connection}, {"message", to_json_value(in.message)}});
    }
    out += json{{"tick", k}, {"inbound", inbound}}.dump() + "\n";
  }
  return out;
}

inline UpdateTrace decode_trace(std::istream& in) {
  UpdateTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedMessage(line_no, e.byte, e.what());
    }
    if (!j.is_object() || !j.contains("inbound") || !j["inbound"].is_array()) {
      throw MalformedMessage(line_no, 0, "trace line lacks 'inbound'");
    }
    std::vector<InboundMessage> tick;
    for (const auto& e : j["inbound"]) {
      if (!e.is_object() || !e.contains("connection") || !e["connection"].is_string() || !e.contains("message")) {
        throw MalformedMessage(line_no, 0, "trace entry lacks 'connection' or 'message'");
      }
      tick.push_back({e["connection"].get<std::string>(), from_json_value(e["message"], line_no)});
    }
    trace.ticks.push_back(std::move(tick));
  }
  return trace;
}

// Re-runs a recorded trace against a fresh model; returns FRAME 0 through FRAME n.
inline std::vector<Frame> replay_trace(Model& model, double dt, const UpdateTrace& trace, double t0 = 0.0) {
  Kernel k(model, dt, t0);
  std::vector<Frame> frames{k.current()};
  for (const auto& inbound : trace.ticks) {
    k.tick(inbound);
    frames.push_back(k.current());
  }
  return frames;
}

}  // namespace taftwin::cosim
