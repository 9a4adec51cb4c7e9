#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cliffsim {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
/// Standard gravity used to convert specific impulse to exhaust velocity.
inline constexpr double kStandardGravity = 9.80665;
inline constexpr char kToolVersion[] = "0.1.0";

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// An input lies outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace cliffsim
