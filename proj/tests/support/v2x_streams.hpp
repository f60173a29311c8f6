#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "support/gen.hpp"
#include "taftwin/v2x/misbehavior.hpp"

namespace taftwin::testkit {

inline GeoAnchor test_anchor() { return {48.7665, 11.4258, 370.0}; }

// Kinematically clean CAM stream: straight line, 10 Hz, |a| <= 0.8 of the R2 bound, speed
// at most 0.9 of the R1 bound, displacement exactly the trapezoidal integral of speed.
inline std::vector<v2x::CamMessage> clean_stream(Gen& g, ParticipantId station, std::size_t n,
                                                 const v2x::PlausibilityParams& p = {}) {
  const GeoAnchor anchor = test_anchor();
  const double heading = g.uniform(-std::numbers::pi, std::numbers::pi);
  const double dt = 0.1;
  double t = g.uniform(0.0, 100.0);
  double v = g.uniform(0.0, 0.9 * p.max_speed);
  Vec3 pos{g.uniform(-200, 200), g.uniform(-200, 200), 0.0};
  std::vector<v2x::CamMessage> out;
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint geo = local_to_geo(anchor, pos);
    out.push_back({station, t, geo.lat, geo.lon, v, heading, {4.5, 1.8, 1.5}});
    const double v_next = std::clamp(v + g.uniform(-0.8, 0.8) * p.max_accel * dt, 0.0, 0.9 * p.max_speed);
    const double ds = 0.5 * (v + v_next) * dt;
    pos.x += ds * std::cos(heading);
    pos.y += ds * std::sin(heading);
    v = v_next;
    t += dt;
  }
  return out;
}

struct InjectedViolation {
  std::vector<v2x::CamMessage> stream;
  std::size_t index = 0;  // the offending message
};

// Replaces message `k` of a clean stream so that exactly the given rule's bound is exceeded by
// a factor of at least 1.1 (other rules may fire as well).
inline InjectedViolation inject_violation(Gen& g, v2x::Rule rule, const v2x::PlausibilityParams& p = {}) {
  InjectedViolation iv;
  iv.stream = clean_stream(g, 7, 20, p);
  iv.index = static_cast<std::size_t>(g.integer(1, 19));
  auto& m = iv.stream[iv.index];
  const auto& prev = iv.stream[iv.index - 1];
  const double dt = m.timestamp - prev.timestamp;
  const double factor = g.uniform(1.1, 3.0);
  switch (rule) {
    case v2x::Rule::r1_speed:
      m.speed = p.max_speed * factor;
      break;
    case v2x::Rule::r2_accel: {
      const double dv = p.max_accel * factor * dt;
      m.speed = prev.speed + dv <= p.max_speed ? prev.speed + dv : prev.speed - dv;
      if (m.speed < 0.0) m.speed = prev.speed + dv;  // slow stream: up is always in range here
      break;
    }
    case v2x::Rule::r3_jump: {
      const GeoAnchor anchor = test_anchor();
      const Vec3 base = geo_to_local(anchor, prev.lat, prev.lon);
      const double bound = (std::max(prev.speed, m.speed) + p.jump_margin) * dt;
      const double dir = g.uniform(-std::numbers::pi, std::numbers::pi);
      const GeoPoint geo = local_to_geo(anchor, {base.x + bound * factor * std::cos(dir), base.y + bound * factor * std::sin(dir), 0.0});
      m.lat = geo.lat;
      m.lon = geo.lon;
      break;
    }
    case v2x::Rule::r4_unconfirmed:
      break;
  }
  return iv;
}

}  // namespace taftwin::testkit
