#pragma once

#include <algorithm>
#include <random>

#include "taftwin/core/polyline.hpp"
#include "taftwin/core/types.hpp"

namespace taftwin::behavior {

struct DriverParams {
  double v_mu = 13.9;    // mean set speed [m/s]
  double v_sigma = 1.5;  // set-speed spread [m/s]
  double a = 2.5;        // max acceleration [m/s^2]
  double a_b = 6.0;      // max braking acceleration [m/s^2]
  double xi = 0.0;       // per-vehicle draw in [-1, 1]
};

inline void check_params(const DriverParams& p) {
  if (!(p.a > 0.0) || !(p.a_b > 0.0)) throw PreconditionError("driver accelerations must be positive");
  if (!(p.v_sigma >= 0.0) || !(p.v_mu >= p.v_sigma)) throw PreconditionError("require v_mu >= v_sigma >= 0");
  if (!(p.xi >= -1.0 && p.xi <= 1.0)) throw PreconditionError("xi must lie in [-1, 1]");
}

struct ObstacleObservation {
  double d_stop = 0.0;  // distance at which to stop [m]
  double v_obs = 0.0;   // obstacle speed along ego heading minus ego speed [m/s]
};

// Tunables of the virtual driver that are not per-vehicle.
struct DriverTuning {
  double d_margin = 2.0;       // safety gap kept to obstacles [m]
  double lookahead_m = 80.0;   // obstacle scan horizon [m]
  double lerp_norm_m = 50.0;   // normalisation distance of the obstacle-speed term [m]
};

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Uniform per-vehicle draw, taken once at spawn.
template <class Rng>
double draw_xi(Rng& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

inline double draw_set_speed(const DriverParams& p) { return p.v_mu + p.xi * p.v_sigma; }

// Braking envelope of the driver: the deceleration it plans with.
inline double planned_deceleration(double a_b) { return 3.0 * a_b / 4.0; }

// Distance needed to stop from v_set at the planned deceleration.
inline double stopping_envelope(double v_set, double a_b) {
  const double a_max = planned_deceleration(a_b);
  const double t0 = v_set / a_max;
  return v_set * t0 - 0.5 * a_max * t0 * t0;
}

inline double target_velocity(double v_set, double a_b, const ObstacleObservation& obs,
                              double lerp_norm_m = 50.0) {
  const double dx = stopping_envelope(v_set, a_b);
  const double t = std::clamp(obs.d_stop / dx, 0.0, 1.0);
  const double v = lerp(obs.v_obs * obs.d_stop / lerp_norm_m, v_set, t);
  return std::clamp(v, 0.0, v_set);
}

inline double pedal(double v_target, double v_cur) { return std::clamp(v_target - v_cur, -1.0, 1.0); }

// Longitudinal state of a lane-bound vehicle.
struct LaneKinematics {
  ParticipantState state;
  double s = 0.0;  // arc position on the path
};

// One explicit Euler step: position advances with the prior velocity, then speed
// integrates the pedal acceleration. Speed never drops below zero.
inline LaneKinematics step_vehicle(const LaneKinematics& in, double pedal_value, const DriverParams& p,
                                   double dt, const Polyline& path) {
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  const double accel = pedal_value >= 0.0 ? pedal_value * p.a : pedal_value * p.a_b;
  LaneKinematics out = in;
  out.s = in.s + in.state.speed * dt;
  out.state.speed = std::max(0.0, in.state.speed + accel * dt);
  if (!path.empty()) {
    const PathPose pose = path.at(out.s);
    out.state.position = pose.position;
    out.state.yaw_rate = normalize_yaw(pose.yaw - in.state.yaw) / dt;
    out.state.yaw = pose.yaw;
  }
  out.state.timestamp = in.state.timestamp + dt;
  return out;
}

}  // namespace taftwin::behavior
