#pragma once

// Pinhole camera model, stereo range estimation and hop-target choice.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cliffsim/common.hpp"

namespace cliffsim::perception {

using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

/// s m' = A [R T] M'. World-to-camera: X_c = R X_w + T.
struct CameraModel {
  Mat3 intrinsics = Mat3::Identity();  ///< A
  Mat3 rotation = Mat3::Identity();    ///< R
  Vec3 translation = Vec3::Zero();     ///< T

  void validate() const;
  Vec3 center() const { return -rotation.transpose() * translation; }
};

/// Five-parameter intrinsics: focal lengths, skew and principal point.
Mat3 intrinsics(double fx, double fy, double cx, double cy, double skew = 0.0);

/// Camera at `center` looking along `forward` with image-down roughly `down`.
CameraModel look_at(const Mat3& A, const Vec3& center, const Vec3& forward, const Vec3& down);

/// Pixel of a world point; throws DomainError for non-positive depth.
Vec2 project(const CameraModel& camera, const Vec3& point);

/// Homogeneous form: accepts M' = (X, Y, Z, W) with any W > 0.
Vec2 project_homogeneous(const CameraModel& camera, const Eigen::Vector4d& point);

struct StereoPair {
  CameraModel left;
  CameraModel right;
};

struct RangeEstimate {
  double range = 0.0;      ///< from the left camera centre [m]
  Vec3 point = Vec3::Zero();
  double rayGap = 0.0;     ///< closest distance between the two rays [m]
  bool lowConfidence = false;  ///< rays near parallel
};

/// Midpoint triangulation of the two back-projected rays. `minAngle` is
/// the smallest ray angle (rad) treated as reliable.
RangeEstimate obstacle_distance(const StereoPair& pair, const Vec2& pixelLeft,
                                const Vec2& pixelRight, double minAngle = 1e-4);

/// Nearest candidate grip point above `from` (by more than `minRise`) and
/// within `hopRange`; nullopt when none qualifies.
std::optional<Vec3> select_hop_target(const Vec3& from, const std::vector<Vec3>& candidates,
                                      double hopRange, double minRise = 0.0);

}  // namespace cliffsim::perception
