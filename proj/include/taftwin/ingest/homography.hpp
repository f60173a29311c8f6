#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taftwin/core/error.hpp"

namespace taftwin::ingest {

class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

// One labelled correspondence: pixel (u, v) seen at world (x, y), world in Mercator metres.
struct PointPair {
  double u = 0.0;
  double v = 0.0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PointPair&, const PointPair&) = default;
};

struct CalibrationSet {
  std::string camera_id;
  std::vector<PointPair> pairs;
};

inline constexpr std::size_t kMinPairs = 4;
inline constexpr std::size_t kNearestPairs = 7;

inline void validate_calibration(const CalibrationSet& c) {
  if (c.pairs.size() < kMinPairs) {
    throw PreconditionError("camera '" + c.camera_id + "' has " + std::to_string(c.pairs.size()) +
                            " calibration pairs; at least 4 are required");
  }
  std::set<std::pair<double, double>> pixels;
  for (const auto& p : c.pairs) {
    if (!std::isfinite(p.u) || !std::isfinite(p.v) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw PreconditionError("camera '" + c.camera_id + "' has a non-finite calibration pair");
    }
    if (!pixels.emplace(p.u, p.v).second) {
      throw PreconditionError("camera '" + c.camera_id + "' repeats pixel point (" + std::to_string(p.u) + ", " +
                              std::to_string(p.v) + ")");
    }
  }
}

using Homography = Eigen::Matrix3d;

namespace detail {

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
inline Eigen::Matrix3d normalizer(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean = 0.0;
  for (const auto& p : pts) mean += (p - c).norm();
  mean /= static_cast<double>(pts.size());
  if (!(mean > 0.0)) throw DegenerateConfiguration("all points coincide");
  const double s = std::sqrt(2.0) / mean;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

// Ratio of the point cloud's minor to major spread; zero for collinear points.
inline double spread_ratio(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const double hi = es.eigenvalues()(1);
  return hi > 0.0 ? std::max(0.0, es.eigenvalues()(0)) / hi : 0.0;
}

}  // namespace detail

// Normalised DLT: exact for 4 pairs in general position, least squares for more.
// Throws DegenerateConfiguration when the pairs do not pin down a unique homography.
inline Homography fit_homography(std::span<const PointPair> pairs) {
  if (pairs.size() < kMinPairs) throw PreconditionError("a homography needs at least 4 pairs");
  std::vector<Eigen::Vector2d> src, dst;
  for (const auto& p : pairs) {
    src.emplace_back(p.u, p.v);
    dst.emplace_back(p.x, p.y);
  }
  constexpr double kCollinear = 1e-12;
  if (detail::spread_ratio(src) < kCollinear || detail::spread_ratio(dst) < kCollinear) {
    throw DegenerateConfiguration("calibration points are collinear");
  }
  const Eigen::Matrix3d ts = detail::normalizer(src);
  const Eigen::Matrix3d td = detail::normalizer(dst);

  Eigen::MatrixXd a(2 * pairs.size(), 9);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Vector3d s = ts * src[i].homogeneous();
    const Eigen::Vector3d d = td * dst[i].homogeneous();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -s.x(), -s.y(), -1, 0, 0, 0, d.x() * s.x(), d.x() * s.y(), d.x();
    a.row(r + 1) << 0, 0, 0, -s.x(), -s.y(), -1, d.y() * s.x(), d.y() * s.y(), d.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A unique solution leaves a one-dimensional null space: the second-smallest singular value
  // must stay clear of zero.
  if (sv.size() < 9 || sv(7) <= 1e-9 * sv(0)) {
    throw DegenerateConfiguration("calibration pairs leave the homography underdetermined");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Homography hm = td.inverse() * hn * ts;
  if (std::abs(hm(2, 2)) > 1e-300) hm /= hm(2, 2);
  return hm;
}

inline std::pair<double, double> apply_homography(const Homography& h, double u, double v) {
  const Eigen::Vector3d w = h * Eigen::Vector3d(u, v, 1.0);
  const double x = w.x() / w.z(), y = w.y() / w.z();
  if (!std::isfinite(x) || !std::isfinite(y)) throw OutOfDomain("pixel maps to the horizon of the fitted homography");
  return {x, y};
}

// Calibration pairs ordered by pixel distance to (u, v); ties keep file order.
inline std::vector<PointPair> nearest_pairs(const CalibrationSet& c, double u, double v) {
  std::vector<std::size_t> idx(c.pairs.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto d2 = [&](std::size_t i) {
    const double du = c.pairs[i].u - u, dv = c.pairs[i].v - v;
    return du * du + dv * dv;
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d2(a) < d2(b); });
  std::vector<PointPair> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(c.pairs[i]);
  return out;
}

// Locally adaptive projection: a homography fitted to the k = min(7, n) pairs nearest the
// pixel. A degenerate neighbourhood widens k one pair at a time before giving up.
inline std::pair<double, double> project_point(const CalibrationSet& c, double u, double v,
                                               std::size_t k = kNearestPairs) {
  validate_calibration(c);
  if (k < kMinPairs) throw PreconditionError("neighbourhood size must be at least 4");
  const auto sorted = nearest_pairs(c, u, v);
  for (std::size_t n = std::min(k, sorted.size()); n <= sorted.size(); ++n) {
    try {
      const Homography h = fit_homography(std::span(sorted).first(n));
      return apply_homography(h, u, v);
    } catch (const DegenerateConfiguration&) {
      if (n == sorted.size()) throw;
    }
  }
  throw DegenerateConfiguration("no non-degenerate neighbourhood");
}

// One homography over every pair; the baseline the local method is compared against.
inline Homography fit_global(const CalibrationSet& c) {
  validate_calibration(c);
  return fit_homography(c.pairs);
}

}  // namespace taftwin::ingest
