#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taftwin/core/json_io.hpp"

namespace taftwin::cosim {

inline constexpr std::string_view kProtocolVersion = "taf-twin/1";

enum class MessageKind { hello, welcome, frame, update, ack, control, bye };

inline constexpr std::array<std::string_view, 7> kKindNames{"HELLO", "WELCOME", "FRAME", "UPDATE",
                                                             "ACK",   "CONTROL", "BYE"};

inline std::string_view to_string(MessageKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<MessageKind> parse_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<MessageKind>(i);
  }
  return std::nullopt;
}

inline bool carries_participants(MessageKind k) { return k == MessageKind::frame || k == MessageKind::update; }

// One protocol message. FRAME and UPDATE carry participant states in `payload`; every other
// kind carries an object of control fields. FRAME may also carry the signal track.
struct FrameMessage {
  MessageKind kind = MessageKind::frame;
  std::uint64_t frame_no = 0;
  double sim_time = 0.0;
  std::optional<std::string> client_id;
  std::vector<ParticipantState> participants;
  json control = json::object();
  std::map<std::string, std::string> signals;

  friend bool operator==(const FrameMessage&, const FrameMessage&) = default;
};

inline json to_json_value(const FrameMessage& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["frame_no"] = m.frame_no;
  j["sim_time"] = m.sim_time;
  if (m.client_id) j["client_id"] = *m.client_id;
  if (carries_participants(m.kind)) {
    j["payload"] = m.participants;
  } else {
    j["payload"] = m.control;
  }
  if (m.kind == MessageKind::frame && !m.signals.empty()) j["signals"] = m.signals;
  return j;
}

// One message per line; the trailing newline is part of the encoding.
inline std::string encode_message(const FrameMessage& m) { return to_json_value(m).dump() + "\n"; }

inline FrameMessage from_json_value(const json& j, std::size_t line_no = 1) {
  auto bad = [&](const std::string& what) { return MalformedMessage(line_no, 0, what); };
  if (!j.is_object()) throw bad("message is not a JSON object");
  FrameMessage m;
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) throw bad("missing 'kind'");
  const auto kind = parse_kind(kind_it->get<std::string>());
  if (!kind) throw bad("unknown kind '" + kind_it->get<std::string>() + "'");
  m.kind = *kind;
  auto fn = j.find("frame_no");
  const bool valid_frame_no = fn != j.end() && (fn->is_number_unsigned() ||
                                                (fn->is_number_integer() && fn->get<std::int64_t>() >= 0));
  if (!valid_frame_no) throw bad("invalid 'frame_no'");
  m.frame_no = fn->get<std::uint64_t>();
  auto st = j.find("sim_time");
  if (st == j.end() || !st->is_number()) throw bad("invalid 'sim_time'");
  m.sim_time = st->get<double>();
  if (auto cid = j.find("client_id"); cid != j.end() && !cid->is_null()) {
    if (!cid->is_string()) throw bad("'client_id' must be a string");
    m.client_id = cid->get<std::string>();
  }
  auto payload = j.find("payload");
  try {
    if (carries_participants(m.kind)) {
      if (payload == j.end() || !payload->is_array()) throw bad("payload must be an array of participants");
      m.participants = payload->get<std::vector<ParticipantState>>();
    } else if (payload != j.end() && !payload->is_null()) {
      if (!payload->is_object()) throw bad("payload must be an object of control fields");
      m.control = *payload;
    }
    if (auto sig = j.find("signals"); m.kind == MessageKind::frame && sig != j.end()) {
      m.signals = sig->get<std::map<std::string, std::string>>();
    }
  } catch (const ConfigError& e) {
    throw bad(e.what());
  } catch (const json::exception& e) {
    throw bad(e.what());
  }
  return m;
}

// Parses one line (with or without its newline). Unknown fields are ignored.
inline FrameMessage decode_message(std::string_view line, std::size_t line_no = 1) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedMessage(line_no, e.byte, e.what());
  }
  return from_json_value(j, line_no);
}

// HELLO payload: protocol version, display name, ids to take over, participants to spawn,
// and whether the master should wait for this client every frame.
struct HelloRequest {
  std::string version{kProtocolVersion};
  std::string name;
  std::vector<ParticipantId> claim_ids;
  std::vector<ParticipantState> spawn;
  bool lockstep = true;
};

inline FrameMessage make_hello(const HelloRequest& h) {
  FrameMessage m;
  m.kind = MessageKind::hello;
  m.control = json{{"version", h.version},
                   {"name", h.name},
                   {"claim_ids", h.claim_ids},
                   {"spawn", h.spawn},
                   {"lockstep", h.lockstep}};
  return m;
}

inline HelloRequest parse_hello(const FrameMessage& m) {
  HelloRequest h;
  h.version = get_field_or<std::string>(m.control, "version", "");
  h.name = get_field_or<std::string>(m.control, "name", "");
  h.claim_ids = get_field_or<std::vector<ParticipantId>>(m.control, "claim_ids", {});
  h.spawn = get_field_or<std::vector<ParticipantState>>(m.control, "spawn", {});
  h.lockstep = get_field_or<bool>(m.control, "lockstep", true);
  return h;
}

}  // namespace taftwin::cosim
