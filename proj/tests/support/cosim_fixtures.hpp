#pragma once

#include <map>
#include <string>
#include <vector>

#include "support/gen.hpp"
#include "taftwin/cosim/message.hpp"
#include "taftwin/cosim/kernel.hpp"

namespace taftwin::testkit {

inline ParticipantState car(ParticipantId id, double x, double y, double speed, double yaw = 0.0) {
  ParticipantState s;
  s.id = id;
  s.cls = ParticipantClass::car;
  s.position = {x, y, 0.0};
  s.speed = speed;
  s.yaw = yaw;
  s.dimensions = default_dimensions(ParticipantClass::car);
  return s;
}

inline cosim::FrameMessage update_msg(std::uint64_t frame_no, const std::string& client, std::vector<ParticipantState> states) {
  cosim::FrameMessage m;
  m.kind = cosim::MessageKind::update;
  m.frame_no = frame_no;
  m.client_id = client;
  m.participants = std::move(states);
  return m;
}

inline cosim::FrameMessage hello_msg(std::vector<ParticipantId> claims, std::vector<ParticipantState> spawn = {}) {
  cosim::HelloRequest h;
  h.name = "test";
  h.claim_ids = std::move(claims);
  h.spawn = std::move(spawn);
  return cosim::make_hello(h);
}

// A session with several clients joining, writing, misbehaving, and leaving.
inline cosim::UpdateTrace random_trace(testkit::Gen& g, std::size_t ticks) {
  cosim::UpdateTrace trace;
  std::map<std::string, std::vector<ParticipantId>> claims{{"a", {1, 2}}, {"b", {2, 3}}, {"c", {}}};
  std::map<std::string, std::string> joined;  // connection -> client id, assigned in join order
  for (std::size_t k = 0; k < ticks; ++k) {
    std::vector<cosim::InboundMessage> in;
    for (const auto& [conn, ids] : claims) {
      if (!joined.count(conn) && g.coin(0.1)) {
        in.push_back({conn, hello_msg(ids, conn == "c" ? std::vector{car(0, 0, 20, 3)} : std::vector<ParticipantState>{})});
        joined[conn] = "c" + std::to_string(joined.size() + 1);
        continue;
      }
      if (!joined.count(conn)) continue;
      const int r = g.integer(0, 9);
      const std::string cid = joined.at(conn);
      if (r < 6) {
        std::vector<ParticipantState> states;
        for (ParticipantId id = 1; id <= 5; ++id) {
          if (g.coin(0.5)) states.push_back(car(id, g.uniform(-50, 50), g.uniform(-50, 50), g.uniform(0, 20), g.uniform(-4, 4)));
        }
        const auto fn = g.coin(0.9) ? k : k + 1;  // occasionally stale
        in.push_back({conn, update_msg(fn, cid, states)});
      } else if (r == 6) {
        cosim::FrameMessage ack;
        ack.kind = cosim::MessageKind::ack;
        ack.frame_no = k;
        in.push_back({conn, ack});
      }
    }
    trace.ticks.push_back(std::move(in));
  }
  return trace;
}

}  // namespace taftwin::testkit
