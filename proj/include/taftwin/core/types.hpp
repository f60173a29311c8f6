#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "taftwin/core/error.hpp"

namespace taftwin {

using ParticipantId = std::uint64_t;

enum class ParticipantClass { car, truck, bus, tram, bicycle, pedestrian, unknown };
enum class Source { simulated, recorded, external_client, v2x, perception };

inline constexpr std::array<std::string_view, 7> kClassNames{
    "car", "truck", "bus", "tram", "bicycle", "pedestrian", "unknown"};
inline constexpr std::array<std::string_view, 5> kSourceNames{
    "simulated", "recorded", "external_client", "v2x", "perception"};

inline std::string_view to_string(ParticipantClass c) {
  return kClassNames[static_cast<std::size_t>(c)];
}
inline std::string_view to_string(Source s) { return kSourceNames[static_cast<std::size_t>(s)]; }

inline std::optional<ParticipantClass> parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<ParticipantClass>(i);
  }
  return std::nullopt;
}

inline std::optional<Source> parse_source(std::string_view name) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (kSourceNames[i] == name) return static_cast<Source>(i);
  }
  return std::nullopt;
}

inline bool is_vru(ParticipantClass c) {
  return c == ParticipantClass::pedestrian || c == ParticipantClass::bicycle;
}

inline bool is_motor_vehicle(ParticipantClass c) {
  return c == ParticipantClass::car || c == ParticipantClass::truck || c == ParticipantClass::bus ||
         c == ParticipantClass::tram;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
};

inline double distance_xy(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Dimensions {
  double length = 4.5;
  double width = 1.8;
  double height = 1.5;
  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

// Typical footprint per class, used where a sensor delivers only position and class.
inline Dimensions default_dimensions(ParticipantClass c) {
  switch (c) {
    case ParticipantClass::car: return {4.5, 1.8, 1.5};
    case ParticipantClass::truck: return {10.0, 2.5, 3.5};
    case ParticipantClass::bus: return {12.0, 2.55, 3.2};
    case ParticipantClass::tram: return {30.0, 2.65, 3.4};
    case ParticipantClass::bicycle: return {1.8, 0.6, 1.7};
    case ParticipantClass::pedestrian: return {0.5, 0.5, 1.8};
    case ParticipantClass::unknown: return {1.0, 1.0, 1.0};
  }
  return {1.0, 1.0, 1.0};
}

// Maps any angle to (-pi, pi].
inline double normalize_yaw(double yaw) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(yaw, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

struct ParticipantState {
  ParticipantId id = 0;
  double timestamp = 0.0;
  ParticipantClass cls = ParticipantClass::unknown;
  Vec3 position{};
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double speed = 0.0;
  Dimensions dimensions{};
  Source source = Source::simulated;

  friend bool operator==(const ParticipantState&, const ParticipantState&) = default;
};

// Returns an empty string when the state honors its invariants, else the first violation.
inline std::string check_state(const ParticipantState& s) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(s.timestamp) || !finite(s.position.x) || !finite(s.position.y) ||
      !finite(s.position.z) || !finite(s.yaw) || !finite(s.yaw_rate) || !finite(s.speed)) {
    return "non-finite field";
  }
  if (s.speed < 0.0) return "negative speed";
  if (!(s.dimensions.length > 0.0 && s.dimensions.width > 0.0 && s.dimensions.height > 0.0)) {
    return "non-positive dimension";
  }
  if (!(s.yaw > -std::numbers::pi && s.yaw <= std::numbers::pi)) return "yaw not normalized";
  return {};
}

}  // namespace taftwin
