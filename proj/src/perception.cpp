#include "cliffsim/perception.hpp"

#include <cmath>
#include <limits>

namespace cliffsim::perception {

void CameraModel::validate() const {
  if (!intrinsics.allFinite() || !rotation.allFinite() || !translation.allFinite())
    throw DomainError("camera: non-finite parameters");
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw DomainError("camera: rotation must be orthonormal with det +1");
  if (intrinsics(1, 0) != 0.0 || intrinsics(2, 0) != 0.0 || intrinsics(2, 1) != 0.0)
    throw DomainError("camera: intrinsics must be upper triangular");
  if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0) || !(intrinsics(2, 2) > 0.0))
    throw DomainError("camera: focal terms must be positive");
}

Mat3 intrinsics(double fx, double fy, double cx, double cy, double skew) {
  Mat3 A;
  A << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return A;
}

CameraModel look_at(const Mat3& A, const Vec3& center, const Vec3& forward, const Vec3& down) {
  const Vec3 z = forward.normalized();
  const Vec3 x = down.cross(z).normalized();
  const Vec3 y = z.cross(x);
  CameraModel cam;
  cam.intrinsics = A;
  cam.rotation.row(0) = x.transpose();
  cam.rotation.row(1) = y.transpose();
  cam.rotation.row(2) = z.transpose();
  cam.translation = -cam.rotation * center;
  return cam;
}

Vec2 project_homogeneous(const CameraModel& camera, const Eigen::Vector4d& point) {
  if (!(point.w() > 0.0)) throw DomainError("project: homogeneous weight must be positive");
  Eigen::Matrix<double, 3, 4> Rt;
  Rt << camera.rotation, camera.translation;
  const Vec3 sm = camera.intrinsics * Rt * point;
  // Depth is the camera-frame z, unaffected by A's last row being (0 0 1).
  const double depth = (camera.rotation.row(2).dot(point.head<3>()) +
                        camera.translation.z() * point.w());
  if (!(depth > 0.0)) throw DomainError("project: point has non-positive depth");
  return sm.head<2>() / sm.z();
}

Vec2 project(const CameraModel& camera, const Vec3& point) {
  return project_homogeneous(camera, point.homogeneous());
}

namespace {

// Unit world-frame direction of the ray through a pixel.
Vec3 back_project(const CameraModel& cam, const Vec2& pixel) {
  const Vec3 dirCam = cam.intrinsics.triangularView<Eigen::Upper>().solve(pixel.homogeneous());
  return (cam.rotation.transpose() * dirCam).normalized();
}

}  // namespace

RangeEstimate obstacle_distance(const StereoPair& pair, const Vec2& pixelLeft,
                                const Vec2& pixelRight, double minAngle) {
  const Vec3 c1 = pair.left.center(), c2 = pair.right.center();
  const Vec3 d1 = back_project(pair.left, pixelLeft), d2 = back_project(pair.right, pixelRight);
  RangeEstimate out;
  const double b = d1.dot(d2);
  const double denom = 1.0 - b * b;
  const double angle = std::atan2(d1.cross(d2).norm(), b);
  if (angle < minAngle || denom <= 0.0) {
    out.lowConfidence = true;
    out.range = std::numeric_limits<double>::infinity();
    out.point = c1 + d1 * out.range;
    return out;
  }
  // Closest points c1 + s d1 and c2 + u d2.
  const Vec3 w = c1 - c2;
  const double d = d1.dot(w), e = d2.dot(w);
  const double s = (b * e - d) / denom;
  const double u = (e - b * d) / denom;
  const Vec3 p1 = c1 + s * d1, p2 = c2 + u * d2;
  out.point = 0.5 * (p1 + p2);
  out.rayGap = (p1 - p2).norm();
  out.range = (out.point - c1).norm();
  out.lowConfidence = s <= 0.0 || u <= 0.0;
  return out;
}

std::optional<Vec3> select_hop_target(const Vec3& from, const std::vector<Vec3>& candidates,
                                      double hopRange, double minRise) {
  std::optional<Vec3> best;
  double bestDist = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    if (!c.allFinite() || c.z() - from.z() <= minRise) continue;
    const double dist = (c - from).norm();
    if (dist <= hopRange && dist < bestDist) {
      bestDist = dist;
      best = c;
    }
  }
  return best;
}

}  // namespace cliffsim::perception
