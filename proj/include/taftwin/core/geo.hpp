#pragma once

#include <cmath>
#include <numbers>

#include "taftwin/core/error.hpp"
#include "taftwin/core/types.hpp"

namespace taftwin {

inline constexpr double kEarthRadius = 6378137.0;
inline constexpr double kMercatorMaxLat = 85.05113;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct MercatorPoint {
  double x = 0.0;
  double y = 0.0;
};

// Binds the local ENU simulation frame to WGS-84.
struct GeoAnchor {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double origin_alt = 0.0;

  friend bool operator==(const GeoAnchor&, const GeoAnchor&) = default;
};

inline void check_anchor(const GeoAnchor& a) {
  if (!(std::abs(a.origin_lat) < 90.0) || !(std::abs(a.origin_lon) <= 180.0)) {
    throw PreconditionError("geo anchor outside |lat| < 90, |lon| <= 180");
  }
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Spherical web-Mercator forward projection.
inline MercatorPoint wgs84_to_mercator(double lat, double lon) {
  if (!(std::abs(lat) <= kMercatorMaxLat)) throw OutOfDomain("latitude beyond Mercator cutoff");
  if (!(std::abs(lon) <= 180.0)) throw OutOfDomain("longitude outside [-180, 180]");
  const double x = kEarthRadius * deg2rad(lon);
  // asinh(tan) is exactly zero on the equator, unlike log(tan(pi/4 + lat/2)).
  const double y = kEarthRadius * std::asinh(std::tan(deg2rad(lat)));
  return {x, y};
}

inline GeoPoint mercator_to_wgs84(double x, double y) {
  const double lon = rad2deg(x / kEarthRadius);
  const double lat = rad2deg(std::atan(std::sinh(y / kEarthRadius)));
  return {lat, lon};
}

// Local ENU metres are anchor-relative Mercator metres rescaled by cos(anchor latitude),
// so distances near the anchor are true metres. z is carried through unchanged
// (altitude minus anchor altitude); it is not geodetic.
inline double mercator_scale(const GeoAnchor& a) { return std::cos(deg2rad(a.origin_lat)); }

inline Vec3 mercator_to_local(const GeoAnchor& a, const MercatorPoint& m, double alt = 0.0) {
  const MercatorPoint o = wgs84_to_mercator(a.origin_lat, a.origin_lon);
  const double k = mercator_scale(a);
  return {(m.x - o.x) * k, (m.y - o.y) * k, alt - a.origin_alt};
}

inline MercatorPoint local_to_mercator(const GeoAnchor& a, const Vec3& p) {
  const MercatorPoint o = wgs84_to_mercator(a.origin_lat, a.origin_lon);
  const double k = mercator_scale(a);
  return {o.x + p.x / k, o.y + p.y / k};
}

inline Vec3 geo_to_local(const GeoAnchor& a, double lat, double lon, double alt = 0.0) {
  return mercator_to_local(a, wgs84_to_mercator(lat, lon), alt);
}

inline GeoPoint local_to_geo(const GeoAnchor& a, const Vec3& p) {
  const MercatorPoint m = local_to_mercator(a, p);
  return mercator_to_wgs84(m.x, m.y);
}

}  // namespace taftwin
