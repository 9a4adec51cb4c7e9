#pragma once

// Single-robot rigid-body flight: main thruster along body +z, three-axis
// reaction-wheel PD attitude control, RK4 integration, propellant ledger,
// and burn-coast hop planning.

#include <Eigen/Geometry>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cliffsim/common.hpp"

namespace cliffsim::dynamics {

struct Body {
  std::string name;
  double gravity = 0.0;  ///< surface acceleration along -z [m/s^2]
};

Body mars();
Body moon();
Body ceres();
Body phobos();
/// Case-insensitive lookup among the four built-in bodies.
std::optional<Body> body_by_name(const std::string& name);
void validate(const Body& body);

struct PdGains {
  Vec3 kp = Vec3::Constant(0.5);     ///< [N m / rad]
  Vec3 kd = Vec3::Constant(0.2324);  ///< [N m s / rad], critical for 3 kg / 0.3 m
};

struct RobotParams {
  double mass = 3.0;        ///< [kg]
  double diameter = 0.3;    ///< [m]
  double thrust = 0.0;      ///< [N]; zero means "not yet calibrated"
  double specificImpulse = 300.0;  ///< [s]
  PdGains gains;
  double rateGain = 2.0;       ///< K_d used in rate-command (wall) hops
  double torqueLimit = 0.2;    ///< per-axis wheel torque [N m]
  double propellantBudget = 1.0;  ///< [kg]
  double contactSpeed = 0.0;   ///< downward speed at wall contact [m/s]
  double clearanceTilt = deg2rad(2.0);  ///< peak thrust tilt off the wall [rad]
  double launchTilt = deg2rad(45.0);    ///< thrust tilt for ground hops [rad]

  /// Principal inertia of a solid sphere, 2/5 m r^2 on each axis.
  Vec3 inertia() const;
  /// Propellant mass flow at full thrust [kg/s].
  double mass_flow() const;
};

void validate(const RobotParams& params);

enum class Mode { Anchored, Hopping, Gripping, Slipped };
const char* to_string(Mode mode);

struct RobotState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();  ///< body to world
  Vec3 angularVelocity = Vec3::Zero();  ///< body frame [rad/s]
  double propellant = 0.0;              ///< [kg]
  Mode mode = Mode::Anchored;
};

/// Z-Y-X intrinsic angles returned as (roll, pitch, yaw).
Vec3 euler_zyx(const Eigen::Quaterniond& q);
Eigen::Quaterniond from_euler_zyx(double roll, double pitch, double yaw);
/// Wrap to (-pi, pi].
double wrap_angle(double angle);

/// tau = K_p (e_des - e_act) + K_d (w_des - w_act), per axis, with the
/// angle error wrapped and each component clipped to +-torqueLimit.
Vec3 pd_torque(const PdGains& gains, const Vec3& eulerDes, const Vec3& eulerAct,
               const Vec3& rateDes, const Vec3& rateAct, double torqueLimit);

struct AttitudeSetpoint {
  Vec3 euler = Vec3::Zero();
  Vec3 rate = Vec3::Zero();
  std::optional<PdGains> gains;  ///< falls back to RobotParams::gains
};

/// Time derivative of a RobotState.
struct StateRate {
  Vec3 dPosition = Vec3::Zero();
  Vec3 dVelocity = Vec3::Zero();
  Eigen::Vector4d dAttitude = Eigen::Vector4d::Zero();  ///< (w, x, y, z)
  Vec3 dAngularVelocity = Vec3::Zero();
  double dPropellant = 0.0;
};

/// `thrustLevel` in [0, 1] scales the main engine (partial final burn).
StateRate state_rate(const RobotState& state, const RobotParams& params, const Body& body,
                     const AttitudeSetpoint& setpoint, double thrustLevel,
                     const Vec3& externalForce);

/// state + h * rate, attitude not renormalised.
RobotState advance(const RobotState& state, const StateRate& rate, double h);

/// External force as a function of the robot's own state (e.g. a tether).
using ForceField = std::function<Vec3(const RobotState&)>;

struct StepResult {
  RobotState state;
  bool propellantExhausted = false;
};

StepResult step(const RobotState& state, const RobotParams& params, const Body& body,
                bool thrustOn, const Vec3& externalForce, double dt,
                const AttitudeSetpoint& setpoint = {});

StepResult step_in_field(const RobotState& state, const RobotParams& params, const Body& body,
                         bool thrustOn, const ForceField& field, double dt,
                         const AttitudeSetpoint& setpoint = {});

/// Unpowered specific mechanical energy v^2/2 + g z.
double specific_energy(const RobotState& state, const Body& body);

// ---------------------------------------------------------------------------
// Hops

enum class Surface { Horizontal, Vertical };

/// The target cannot be reached with the available thrust or propellant.
class PlanningError : public std::runtime_error {
 public:
  PlanningError(const std::string& what, double maxReach)
      : std::runtime_error(what), maxReach_(maxReach) {}
  double max_reach() const { return maxReach_; }

 private:
  double maxReach_;
};

/// Open-loop burn-coast profile.
///
/// Vertical wall (wall plane y = 0, outward +y): the robot launches
/// pre-tilted `clearanceTilt` away from the wall and, in rate-command mode
/// (K_p = 0, K_d = rateGain), sweeps its roll through one full cosine
/// period over the burn so the thrust's wall-normal impulse and
/// displacement both return to zero. A constant pitch `lateralTilt` steers
/// along the wall. The burn is sized so the apex overshoots the target by
/// contactSpeed^2 / 2g; the hop ends when the robot descends through the
/// target height.
///
/// Horizontal ground: attitude held by proportional control (K_d = 0) at
/// `launchTilt` towards the target heading; the hop ends on touchdown.
struct HopPlan {
  Surface surface = Surface::Vertical;
  Vec3 displacement = Vec3::Zero();
  double burnTime = 0.0;
  double lateralTilt = 0.0;
  double heading = 0.0;
  double launchTilt = 0.0;
  double clearanceTilt = 0.0;
  double overshoot = 0.0;  ///< apex height above the target [m]

  bool trivial() const { return burnTime <= 0.0; }
  Eigen::Quaterniond launch_attitude() const;
  AttitudeSetpoint setpoint(double t, const RobotParams& params) const;
  double propellant(const RobotParams& params) const;
};

HopPlan plan_hop(const RobotState& state, const RobotParams& params, const Body& body,
                 const Vec3& displacement, Surface surface);

struct TrajectorySample {
  double t = 0.0;
  RobotState state;
};

struct HopResult {
  std::vector<TrajectorySample> trajectory;
  double propellantUsed = 0.0;
  double duration = 0.0;
  Vec3 displacement = Vec3::Zero();
  double apexHeight = 0.0;  ///< max z minus launch z
  bool propellantExhausted = false;
};

struct FlightOptions {
  double dt = 1e-3;
  double sampleInterval = 0.01;
  double maxDuration = 1e4;
};

/// Fly a plan from `state` (attitude is reset to the launch attitude).
HopResult fly_hop(const RobotState& state, const RobotParams& params, const Body& body,
                  const HopPlan& plan, const ForceField& field = {},
                  const FlightOptions& options = {});

/// Plan and fly in free space.
HopResult execute_hop(const RobotState& state, const RobotParams& params, const Body& body,
                      const Vec3& displacement, Surface surface = Surface::Vertical,
                      const FlightOptions& options = {});

// ---------------------------------------------------------------------------
// Thruster calibration

struct CalibrationTarget {
  Body body = mars();
  double displacement = 1.27;  ///< vertical wall climb [m]
  double duration = 1.5;       ///< [s]
  double propellant = 0.005;   ///< [kg]
};

struct CalibrationResult {
  RobotParams params;  ///< input params with thrust and contactSpeed filled in
  double burnTime = 0.0;
  double achievedDisplacement = 0.0;
  double achievedPropellant = 0.0;
};

/// Solve the main-engine thrust (at the configured specific impulse) so
/// that a wall hop spending exactly `propellant` is at `displacement` after
/// `duration`; the vertical speed at that instant becomes contactSpeed.
CalibrationResult calibrate_thruster(const RobotParams& base, const CalibrationTarget& target,
                                     double dt = 1e-3);

struct VerticalReach {
  Body body;
  double atHopTime = 0.0;  ///< height gained after the nominal hop time [m]
  double apex = 0.0;       ///< maximum height gained [m]
  double apexTime = 0.0;   ///< [s]
};

/// Fly the calibrated wall profile with a fixed propellant charge on
/// another body.
VerticalReach vertical_reach(const RobotParams& params, const Body& body, double propellant,
                             double hopTime, double dt = 1e-3);

}  // namespace cliffsim::dynamics
