#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "taftwin/v2x/messages.hpp"

namespace taftwin::v2x {

struct PlausibilityParams {
  double max_speed = 70.0;        // R1, m/s
  double max_accel = 12.0;        // R2, m/s^2
  double jump_margin = 5.0;       // R3, m/s added to the claimed speed
  double r_confirm = 3.0;         // R4, metres
  std::size_t confirm_frames = 10;  // R4, consecutive unconfirmed CAMs
};

enum class Rule { r1_speed, r2_accel, r3_jump, r4_unconfirmed };

inline std::string_view rule_id(Rule r) {
  switch (r) {
    case Rule::r1_speed: return "R1";
    case Rule::r2_accel: return "R2";
    case Rule::r3_jump: return "R3";
    case Rule::r4_unconfirmed: return "R4";
  }
  return "?";
}

struct MessageRef {
  ParticipantId station_id = 0;
  double timestamp = 0.0;
  friend bool operator==(const MessageRef&, const MessageRef&) = default;
};

struct MisbehaviorVerdict {
  ParticipantId station_id = 0;
  Rule rule = Rule::r1_speed;
  double severity = 0.0;  // measured value over its bound; > 1 for every verdict
  std::vector<MessageRef> evidence;
  double measured = 0.0;
  double bound = 0.0;
};

inline void to_json(json& j, const MisbehaviorVerdict& v) {
  json ev = json::array();
  for (const auto& e : v.evidence) ev.push_back(json{{"station_id", e.station_id}, {"timestamp", e.timestamp}});
  j = json{{"station_id", v.station_id}, {"rule", std::string(rule_id(v.rule))}, {"severity", v.severity},
           {"measured", v.measured},     {"bound", v.bound},                      {"evidence", ev}};
}

// Stream fold over CAMs, one state per station. R1 to R3 compare a CAM with its predecessor;
// R4 compares a CAM with the perception object list valid at its timestamp.
class PlausibilityChecker {
 public:
  explicit PlausibilityChecker(GeoAnchor anchor, PlausibilityParams p = {}) : anchor_(anchor), p_(p) {}

  // `perception` holds independently sensed object positions in local metres; pass nullptr
  // when no object list is available and R4 is skipped for this message.
  std::vector<MisbehaviorVerdict> check(const CamMessage& m, const std::vector<Vec3>* perception = nullptr) {
    std::vector<MisbehaviorVerdict> out;
    const MessageRef ref{m.station_id, m.timestamp};
    const Vec3 pos = geo_to_local(anchor_, m.lat, m.lon);
    auto& st = stations_[m.station_id];

    if (std::abs(m.speed) > p_.max_speed) out.push_back(verdict(m, Rule::r1_speed, std::abs(m.speed), p_.max_speed, {ref}));

    if (st.seen) {
      const double dt = m.timestamp - st.last.timestamp;
      if (dt < 0.0) throw PreconditionError("CAM stream of station " + std::to_string(m.station_id) + " goes back in time");
      if (dt > 0.0) {
        const MessageRef prev{m.station_id, st.last.timestamp};
        const double accel = std::abs(m.speed - st.last.speed) / dt;
        if (accel > p_.max_accel) out.push_back(verdict(m, Rule::r2_accel, accel, p_.max_accel, {prev, ref}));
        const double jump = std::hypot(pos.x - st.pos.x, pos.y - st.pos.y);
        const double bound = (std::max(std::abs(m.speed), std::abs(st.last.speed)) + p_.jump_margin) * dt;
        if (jump > bound) out.push_back(verdict(m, Rule::r3_jump, jump, bound, {prev, ref}));
      }
    }

    if (perception) {
      bool confirmed = false;
      for (const auto& o : *perception) {
        if (std::hypot(o.x - pos.x, o.y - pos.y) <= p_.r_confirm) {
          confirmed = true;
          break;
        }
      }
      if (confirmed) {
        st.unconfirmed.clear();
      } else {
        st.unconfirmed.push_back(ref);
        // One verdict per streak, raised when the streak reaches N.
        if (st.unconfirmed.size() == p_.confirm_frames) {
          out.push_back(verdict(m, Rule::r4_unconfirmed, static_cast<double>(st.unconfirmed.size()),
                                static_cast<double>(p_.confirm_frames) - 1.0, st.unconfirmed));
        }
      }
    }

    st.seen = true;
    st.last = m;
    st.pos = pos;
    return out;
  }

  const PlausibilityParams& params() const { return p_; }

 private:
  struct StationState {
    bool seen = false;
    CamMessage last;
    Vec3 pos;
    std::vector<MessageRef> unconfirmed;
  };

  static MisbehaviorVerdict verdict(const CamMessage& m, Rule r, double measured, double bound,
                                    std::vector<MessageRef> evidence) {
    return {m.station_id, r, bound > 0.0 ? measured / bound : measured, std::move(evidence), measured, bound};
  }

  GeoAnchor anchor_;
  PlausibilityParams p_;
  std::map<ParticipantId, StationState> stations_;
};

}  // namespace taftwin::v2x
