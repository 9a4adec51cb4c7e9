#include "cliffsim/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace cliffsim::dynamics {

Body mars() { return {"Mars", 3.71}; }
Body moon() { return {"Moon", 1.62}; }
Body ceres() { return {"Ceres", 0.27}; }
Body phobos() { return {"Phobos", 0.0057}; }

std::optional<Body> body_by_name(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "mars") return mars();
  if (key == "moon") return moon();
  if (key == "ceres") return ceres();
  if (key == "phobos") return phobos();
  return std::nullopt;
}

void validate(const Body& body) {
  if (!(body.gravity > 0.0)) throw DomainError("body: gravity must be positive");
}

Vec3 RobotParams::inertia() const {
  const double r = 0.5 * diameter;
  return Vec3::Constant(0.4 * mass * r * r);
}

double RobotParams::mass_flow() const {
  return thrust / (specificImpulse * kStandardGravity);
}

void validate(const RobotParams& p) {
  if (!(p.mass > 0.0 && p.diameter > 0.0)) throw DomainError("robot: mass and diameter must be positive");
  if (!(p.thrust > 0.0)) throw DomainError("robot: thrust must be positive");
  if (!(p.specificImpulse > 0.0)) throw DomainError("robot: specificImpulse must be positive");
  if (!(p.propellantBudget > 0.0)) throw DomainError("robot: propellantBudget must be positive");
  if (!(p.torqueLimit > 0.0 && p.rateGain > 0.0)) throw DomainError("robot: torqueLimit and rateGain must be positive");
  if ((p.gains.kp.array() < 0.0).any() || (p.gains.kd.array() < 0.0).any()) {
    throw DomainError("robot: PD gains must be non-negative");
  }
  if (!(p.contactSpeed >= 0.0)) throw DomainError("robot: contactSpeed must be non-negative");
  if (!(p.clearanceTilt >= 0.0 && p.clearanceTilt < kPi / 2)) throw DomainError("robot: clearanceTilt out of range");
  if (!(p.launchTilt > 0.0 && p.launchTilt < kPi / 2)) throw DomainError("robot: launchTilt out of range");
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Anchored: return "ANCHORED";
    case Mode::Hopping: return "HOPPING";
    case Mode::Gripping: return "GRIPPING";
    case Mode::Slipped: return "SLIPPED";
  }
  return "?";
}

Vec3 euler_zyx(const Eigen::Quaterniond& q) {
  const Eigen::Matrix3d r = q.normalized().toRotationMatrix();
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

Eigen::Quaterniond from_euler_zyx(double roll, double pitch, double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                            Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

double wrap_angle(double angle) {
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

Vec3 pd_torque(const PdGains& gains, const Vec3& eulerDes, const Vec3& eulerAct,
               const Vec3& rateDes, const Vec3& rateAct, double torqueLimit) {
  Vec3 tau;
  for (int i = 0; i < 3; ++i) {
    const double err = wrap_angle(eulerDes[i] - eulerAct[i]);
    tau[i] = gains.kp[i] * err + gains.kd[i] * (rateDes[i] - rateAct[i]);
    tau[i] = std::clamp(tau[i], -torqueLimit, torqueLimit);
  }
  return tau;
}

StateRate state_rate(const RobotState& s, const RobotParams& p, const Body& body,
                     const AttitudeSetpoint& sp, double thrustLevel, const Vec3& externalForce) {
  StateRate r;
  const Eigen::Quaterniond q = s.attitude.normalized();
  const Vec3 thrust = thrustLevel * p.thrust * (q * Vec3::UnitZ());
  r.dPosition = s.velocity;
  r.dVelocity = (thrust + externalForce) / p.mass - body.gravity * Vec3::UnitZ();

  const PdGains& gains = sp.gains ? *sp.gains : p.gains;
  const Vec3 tau = pd_torque(gains, sp.euler, euler_zyx(q), sp.rate, s.angularVelocity,
                             p.torqueLimit);
  const Vec3 inertia = p.inertia();
  const Vec3& w = s.angularVelocity;
  const Vec3 h = inertia.cwiseProduct(w);
  r.dAngularVelocity = (tau - w.cross(h)).cwiseQuotient(inertia);

  const Eigen::Quaterniond wq(0.0, w.x(), w.y(), w.z());
  const Eigen::Quaterniond qdot = s.attitude * wq;
  r.dAttitude << 0.5 * qdot.w(), 0.5 * qdot.x(), 0.5 * qdot.y(), 0.5 * qdot.z();
  r.dPropellant = -thrustLevel * p.mass_flow();
  return r;
}

RobotState advance(const RobotState& s, const StateRate& r, double h) {
  RobotState out = s;
  out.position += h * r.dPosition;
  out.velocity += h * r.dVelocity;
  out.attitude = Eigen::Quaterniond(s.attitude.w() + h * r.dAttitude[0],
                                    s.attitude.x() + h * r.dAttitude[1],
                                    s.attitude.y() + h * r.dAttitude[2],
                                    s.attitude.z() + h * r.dAttitude[3]);
  out.angularVelocity += h * r.dAngularVelocity;
  out.propellant += h * r.dPropellant;
  return out;
}

namespace {

StateRate combine(const StateRate& k1, const StateRate& k2, const StateRate& k3,
                  const StateRate& k4) {
  StateRate r;
  r.dPosition = (k1.dPosition + 2.0 * k2.dPosition + 2.0 * k3.dPosition + k4.dPosition) / 6.0;
  r.dVelocity = (k1.dVelocity + 2.0 * k2.dVelocity + 2.0 * k3.dVelocity + k4.dVelocity) / 6.0;
  r.dAttitude = (k1.dAttitude + 2.0 * k2.dAttitude + 2.0 * k3.dAttitude + k4.dAttitude) / 6.0;
  r.dAngularVelocity = (k1.dAngularVelocity + 2.0 * k2.dAngularVelocity +
                        2.0 * k3.dAngularVelocity + k4.dAngularVelocity) / 6.0;
  r.dPropellant = (k1.dPropellant + 2.0 * k2.dPropellant + 2.0 * k3.dPropellant +
                   k4.dPropellant) / 6.0;
  return r;
}

template <class Force>
StepResult rk4_step(const RobotState& s, const RobotParams& p, const Body& body, bool thrustOn,
                    Force&& force, double dt, const AttitudeSetpoint& sp) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  StepResult result;
  double level = 0.0;
  if (thrustOn) {
    const double need = p.mass_flow() * dt;
    level = need > 0.0 ? std::min(1.0, s.propellant / need) : 1.0;
    result.propellantExhausted = level < 1.0;
    level = std::max(level, 0.0);
  }
  const StateRate k1 = state_rate(s, p, body, sp, level, force(s));
  const RobotState s2 = advance(s, k1, 0.5 * dt);
  const StateRate k2 = state_rate(s2, p, body, sp, level, force(s2));
  const RobotState s3 = advance(s, k2, 0.5 * dt);
  const StateRate k3 = state_rate(s3, p, body, sp, level, force(s3));
  const RobotState s4 = advance(s, k3, dt);
  const StateRate k4 = state_rate(s4, p, body, sp, level, force(s4));
  result.state = advance(s, combine(k1, k2, k3, k4), dt);
  result.state.attitude.normalize();
  if (result.propellantExhausted || result.state.propellant < 0.0) result.state.propellant = 0.0;
  return result;
}

}  // namespace

StepResult step(const RobotState& state, const RobotParams& params, const Body& body,
                bool thrustOn, const Vec3& externalForce, double dt,
                const AttitudeSetpoint& setpoint) {
  return rk4_step(state, params, body, thrustOn,
                  [&](const RobotState&) { return externalForce; }, dt, setpoint);
}

StepResult step_in_field(const RobotState& state, const RobotParams& params, const Body& body,
                         bool thrustOn, const ForceField& field, double dt,
                         const AttitudeSetpoint& setpoint) {
  if (!field) return step(state, params, body, thrustOn, Vec3(Vec3::Zero()), dt, setpoint);
  return rk4_step(state, params, body, thrustOn, field, dt, setpoint);
}

double specific_energy(const RobotState& state, const Body& body) {
  return 0.5 * state.velocity.squaredNorm() + body.gravity * state.position.z();
}

// ---------------------------------------------------------------------------
// Hop plans

Eigen::Quaterniond HopPlan::launch_attitude() const {
  if (surface == Surface::Vertical) return from_euler_zyx(-clearanceTilt, lateralTilt, 0.0);
  return from_euler_zyx(0.0, launchTilt, heading);
}

AttitudeSetpoint HopPlan::setpoint(double t, const RobotParams& params) const {
  AttitudeSetpoint sp;
  if (surface == Surface::Vertical) {
    PdGains rateMode;
    rateMode.kp = Vec3::Zero();
    rateMode.kd = Vec3::Constant(params.rateGain);
    sp.gains = rateMode;
    sp.euler = Vec3(-clearanceTilt, lateralTilt, 0.0);
    if (t < burnTime && burnTime > 0.0) {
      // roll(t) = -clearanceTilt cos(2 pi t / burnTime)
      const double omega = 2.0 * kPi / burnTime;
      sp.rate.x() = clearanceTilt * omega * std::sin(omega * t);
    }
  } else {
    PdGains holdMode;
    holdMode.kp = params.gains.kp;
    holdMode.kd = Vec3::Zero();
    sp.gains = holdMode;
    sp.euler = Vec3(0.0, launchTilt, heading);
  }
  return sp;
}

double HopPlan::propellant(const RobotParams& params) const {
  return std::max(0.0, burnTime) * params.mass_flow();
}

namespace {

struct FlightEnd {
  std::vector<TrajectorySample> samples;
  RobotState last;
  double t = 0.0;
  double apex = -std::numeric_limits<double>::infinity();
  bool exhausted = false;
};

enum class StopRule { VerticalContact, Touchdown, FixedDuration, Apex };

// Fixed-step flight along a plan with the burn ending exactly on a step
// boundary. The terminating crossing is located by bisection on the size
// of the final step.
FlightEnd integrate(const RobotState& start, const RobotParams& params, const Body& body,
                    const HopPlan& plan, const ForceField& field, const FlightOptions& opt,
                    StopRule rule, double stopValue, bool record) {
  if (!(opt.dt > 0.0)) throw DomainError("flight: dt must be positive");
  const double z0 = start.position.z();
  const double burn = std::max(0.0, plan.burnTime);
  const long burnSteps = burn > 0.0 ? std::max(1L, static_cast<long>(std::ceil(burn / opt.dt - 1e-9))) : 0;
  const double burnDt = burnSteps > 0 ? burn / static_cast<double>(burnSteps) : 0.0;

  FlightEnd out;
  RobotState s = start;
  double t = 0.0;
  double nextSample = 0.0;
  out.apex = s.position.z() - z0;
  if (record) {
    out.samples.push_back({0.0, s});
    nextSample = opt.sampleInterval;
  }

  auto time_at = [&](long k) {
    return k <= burnSteps ? static_cast<double>(k) * burnDt
                          : burn + static_cast<double>(k - burnSteps) * opt.dt;
  };

  for (long k = 0;; ++k) {
    if (t > opt.maxDuration) {
      throw ConvergenceError("flight: exceeded maximum duration", t);
    }
    const bool thrustOn = k < burnSteps;
    const double h = thrustOn ? burnDt : opt.dt;
    const AttitudeSetpoint sp = plan.setpoint(t, params);
    const StepResult r = step_in_field(s, params, body, thrustOn, field, h, sp);
    out.exhausted = out.exhausted || r.propellantExhausted;
    const RobotState& n = r.state;
    const double tn = time_at(k + 1);
    const bool coasting = k + 1 >= burnSteps;

    // Root of g over the final step, found by bisecting the step length.
    auto refine = [&](auto g) {
      double lo = 0.0, hi = h;
      RobotState best = n;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const RobotState m = step_in_field(s, params, body, thrustOn, field, mid, sp).state;
        if (g(m) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
          best = m;
        }
      }
      out.last = best;
      out.t = t + hi;
    };

    bool done = false;
    switch (rule) {
      case StopRule::VerticalContact:
        if (coasting && n.velocity.z() <= 0.0) {
          const double target = z0 + stopValue;
          if (n.position.z() <= target) {
            if (s.position.z() > target) {
              refine([&](const RobotState& m) { return m.position.z() - target; });
            } else {
              refine([&](const RobotState& m) { return m.velocity.z(); });
            }
            done = true;
          }
        }
        break;
      case StopRule::Touchdown:
        if (coasting && n.velocity.z() <= 0.0 && n.position.z() <= z0 && tn > 0.0) {
          refine([&](const RobotState& m) { return m.position.z() - z0; });
          done = true;
        }
        break;
      case StopRule::FixedDuration:
        if (tn >= stopValue - 1e-12) {
          const double hh = stopValue - t;
          out.last = hh > 0.0 ? step_in_field(s, params, body, thrustOn, field, hh, sp).state : s;
          out.t = stopValue;
          done = true;
        }
        break;
      case StopRule::Apex:
        if (coasting && tn >= stopValue && n.velocity.z() <= 0.0) {
          refine([&](const RobotState& m) { return m.velocity.z(); });
          done = true;
        }
        break;
    }
    if (done) {
      out.apex = std::max(out.apex, out.last.position.z() - z0);
      if (rule != StopRule::FixedDuration && s.velocity.z() > 0.0 && coasting) {
        // Exact coast apex inside the final step: constant deceleration g
        // when no external force acts.
        if (!field) {
          const double vz = s.velocity.z();
          out.apex = std::max(out.apex, s.position.z() - z0 + vz * vz / (2.0 * body.gravity));
        }
      }
      if (record) out.samples.push_back({out.t, out.last});
      return out;
    }
    if (coasting && !field && s.velocity.z() > 0.0 && n.velocity.z() <= 0.0) {
      const double vz = s.velocity.z();
      out.apex = std::max(out.apex, s.position.z() - z0 + vz * vz / (2.0 * body.gravity));
    }
    out.apex = std::max(out.apex, n.position.z() - z0);
    s = n;
    t = tn;
    if (record && t >= nextSample - 1e-12) {
      out.samples.push_back({t, s});
      nextSample += opt.sampleInterval;
    }
  }
}

RobotState launch_state(const RobotState& state, const HopPlan& plan) {
  RobotState s = state;
  s.attitude = plan.launch_attitude();
  s.angularVelocity.setZero();
  s.mode = Mode::Hopping;
  return s;
}

// Illinois regula falsi on a function increasing over [lo, hi] with
// f(lo) < 0 < f(hi).
template <class F>
double solve_increasing(F&& f, double lo, double hi, double flo, double fhi, double xtol,
                        double ftol) {
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (std::abs(fx) < ftol || (hi - lo) < xtol) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = f(x);
  if (std::abs(fx) > 1e3 * ftol) throw ConvergenceError("root solve did not converge", fx);
  return x;
}

HopPlan plan_vertical(const RobotState& state, const RobotParams& p, const Body& body,
                      const Vec3& d, double dt) {
  if (std::abs(d.y()) > 1e-12) {
    throw DomainError("plan_hop: wall hops stay in the wall plane (dy must be 0)");
  }
  HopPlan plan;
  plan.surface = Surface::Vertical;
  plan.displacement = d;
  plan.clearanceTilt = p.clearanceTilt;
  if (d.norm() == 0.0) return plan;

  const double accel = p.thrust / p.mass;
  const double burnMax = state.propellant / p.mass_flow();
  plan.overshoot = p.contactSpeed * p.contactSpeed / (2.0 * body.gravity);
  auto apex_of_burn = [&](double tb) {  // vertical thrust, free flight
    return (accel - body.gravity) * tb * tb * accel / (2.0 * body.gravity);
  };
  const double maxReach = accel > body.gravity ? apex_of_burn(burnMax) - plan.overshoot : 0.0;
  if (!(accel > body.gravity)) {
    throw PlanningError("plan_hop: thrust cannot lift the robot against gravity", 0.0);
  }
  if (d.z() < 0.0) throw PlanningError("plan_hop: downward wall hops are not supported", maxReach);
  const double apexTarget = d.z() + plan.overshoot;
  if (!(apexTarget > 0.0)) {
    throw PlanningError("plan_hop: lateral-only wall hop needs a positive contact speed", maxReach);
  }
  if (apexTarget > apex_of_burn(burnMax)) {
    throw PlanningError("plan_hop: target beyond reach of remaining propellant", maxReach);
  }

  FlightOptions opt;
  opt.dt = dt;
  const RobotState start = state;
  auto simulate = [&](double tb, double tilt) {
    HopPlan trial = plan;
    trial.burnTime = tb;
    trial.lateralTilt = tilt;
    const FlightEnd end = integrate(launch_state(start, trial), p, body, trial, {}, opt,
                                    StopRule::VerticalContact, d.z(), false);
    return std::pair{end.apex - apexTarget, end.last.position.x() - start.position.x() - d.x()};
  };

  const double tb0 = std::sqrt(2.0 * body.gravity * apexTarget / ((accel - body.gravity) * accel));
  if (d.x() == 0.0) {
    auto f = [&](double tb) { return simulate(tb, 0.0).first; };
    const double lo = 1e-6;
    double hi = std::min(burnMax, 1.5 * tb0 + dt);
    double fhi = f(hi);
    while (fhi < 0.0 && hi < burnMax) {
      hi = std::min(burnMax, 2.0 * hi);
      fhi = f(hi);
    }
    if (fhi < 0.0) throw PlanningError("plan_hop: target beyond reach of remaining propellant", maxReach);
    plan.burnTime = solve_increasing(f, lo, hi, f(lo), fhi, 1e-13, 1e-10);
    return plan;
  }

  // Two unknowns (burn time, lateral tilt): Newton with a finite-difference
  // Jacobian on (apex error, lateral error).
  Eigen::Vector2d x(tb0, 0.0);
  for (int it = 0; it < 40; ++it) {
    const auto [r1, r2] = simulate(x[0], x[1]);
    if (std::abs(r1) < 1e-10 && std::abs(r2) < 1e-10) break;
    const double h0 = 1e-7, h1 = 1e-7;
    const auto [a1, a2] = simulate(x[0] + h0, x[1]);
    const auto [b1, b2] = simulate(x[0], x[1] + h1);
    Eigen::Matrix2d jac;
    jac << (a1 - r1) / h0, (b1 - r1) / h1, (a2 - r2) / h0, (b2 - r2) / h1;
    Eigen::Vector2d delta = jac.colPivHouseholderQr().solve(Eigen::Vector2d(-r1, -r2));
    // Keep the burn positive and the tilt below 60 degrees.
    double scale = 1.0;
    while (x[0] + scale * delta[0] <= 0.0 || std::abs(x[1] + scale * delta[1]) > deg2rad(60.0)) {
      scale *= 0.5;
    }
    x += scale * delta;
    if (x[0] > burnMax) throw PlanningError("plan_hop: target beyond reach of remaining propellant", maxReach);
    if (it == 39) throw ConvergenceError("plan_hop: lateral wall hop did not converge", std::hypot(r1, r2));
  }
  plan.burnTime = x[0];
  plan.lateralTilt = x[1];
  return plan;
}

HopPlan plan_horizontal(const RobotState& state, const RobotParams& p, const Body& body,
                        const Vec3& d, double dt) {
  if (std::abs(d.z()) > 1e-12) throw DomainError("plan_hop: ground hops land at launch height (dz must be 0)");
  HopPlan plan;
  plan.surface = Surface::Horizontal;
  plan.displacement = d;
  plan.launchTilt = p.launchTilt;
  plan.heading = std::atan2(d.y(), d.x());
  const double range = std::hypot(d.x(), d.y());
  if (range == 0.0) return plan;
  if (!(p.thrust * std::cos(p.launchTilt) > p.mass * body.gravity)) {
    throw PlanningError("plan_hop: tilted thrust cannot lift the robot", 0.0);
  }
  const double burnMax = state.propellant / p.mass_flow();
  FlightOptions opt;
  opt.dt = dt;
  auto f = [&](double tb) {
    HopPlan trial = plan;
    trial.burnTime = tb;
    const FlightEnd end = integrate(launch_state(state, trial), p, body, trial, {}, opt,
                                    StopRule::Touchdown, 0.0, false);
    const Vec3 moved = end.last.position - state.position;
    return std::hypot(moved.x(), moved.y()) - range;
  };
  const double fmax = f(burnMax);
  if (fmax < 0.0) throw PlanningError("plan_hop: target beyond reach of remaining propellant", fmax + range);
  plan.burnTime = solve_increasing(f, 1e-6, burnMax, f(1e-6), fmax, 1e-13, 1e-10);
  return plan;
}

}  // namespace

HopPlan plan_hop(const RobotState& state, const RobotParams& params, const Body& body,
                 const Vec3& displacement, Surface surface) {
  validate(params);
  validate(body);
  if (surface == Surface::Vertical) return plan_vertical(state, params, body, displacement, 1e-3);
  return plan_horizontal(state, params, body, displacement, 1e-3);
}

HopResult fly_hop(const RobotState& state, const RobotParams& params, const Body& body,
                  const HopPlan& plan, const ForceField& field, const FlightOptions& options) {
  HopResult result;
  const RobotState start = launch_state(state, plan);
  if (plan.trivial()) {
    result.trajectory.push_back({0.0, start});
    return result;
  }
  const StopRule rule =
      plan.surface == Surface::Vertical ? StopRule::VerticalContact : StopRule::Touchdown;
  FlightEnd end = integrate(start, params, body, plan, field, options, rule,
                            plan.surface == Surface::Vertical ? plan.displacement.z() : 0.0, true);
  result.trajectory = std::move(end.samples);
  result.propellantUsed = start.propellant - end.last.propellant;
  result.duration = end.t;
  result.displacement = end.last.position - start.position;
  result.apexHeight = end.apex;
  result.propellantExhausted = end.exhausted;
  return result;
}

HopResult execute_hop(const RobotState& state, const RobotParams& params, const Body& body,
                      const Vec3& displacement, Surface surface, const FlightOptions& options) {
  const HopPlan plan = plan_hop(state, params, body, displacement, surface);
  return fly_hop(state, params, body, plan, {}, options);
}

// ---------------------------------------------------------------------------

CalibrationResult calibrate_thruster(const RobotParams& base, const CalibrationTarget& target,
                                     double dt) {
  validate(target.body);
  if (!(target.displacement > 0.0 && target.duration > 0.0 && target.propellant > 0.0)) {
    throw DomainError("calibrate: target displacement, duration and propellant must be positive");
  }
  RobotParams p = base;
  p.thrust = 1.0;  // placeholder so validation sees a positive value
  validate(p);
  const double impulse = target.propellant * p.specificImpulse * kStandardGravity;

  FlightOptions opt;
  opt.dt = dt;
  RobotState start;
  start.propellant = target.propellant;
  auto run = [&](double thrust) {
    RobotParams trial = p;
    trial.thrust = thrust;
    HopPlan plan;
    plan.surface = Surface::Vertical;
    plan.clearanceTilt = p.clearanceTilt;
    plan.burnTime = impulse / thrust;
    return integrate(launch_state(start, plan), trial, target.body, plan, {}, opt,
                     StopRule::FixedDuration, target.duration, false);
  };
  auto f = [&](double thrust) { return run(thrust).last.position.z() - target.displacement; };

  double lo = std::max(p.mass * target.body.gravity, impulse / target.duration) * (1.0 + 1e-6);
  double flo = f(lo);
  if (flo >= 0.0) throw ConvergenceError("calibrate: target reached even at minimum thrust", flo);
  double hi = 2.0 * lo;
  double fhi = f(hi);
  while (fhi < 0.0) {
    if (hi > 1e4 * lo) throw ConvergenceError("calibrate: propellant charge cannot reach target", fhi);
    hi *= 2.0;
    fhi = f(hi);
  }
  const double thrust = solve_increasing(f, lo, hi, flo, fhi, 1e-12, 1e-11);

  const FlightEnd end = run(thrust);
  CalibrationResult out;
  out.params = base;
  out.params.thrust = thrust;
  out.params.contactSpeed = std::max(0.0, -end.last.velocity.z());
  out.burnTime = impulse / thrust;
  out.achievedDisplacement = end.last.position.z();
  out.achievedPropellant = target.propellant - end.last.propellant;
  return out;
}

VerticalReach vertical_reach(const RobotParams& params, const Body& body, double propellant,
                             double hopTime, double dt) {
  validate(params);
  validate(body);
  HopPlan plan;
  plan.surface = Surface::Vertical;
  plan.clearanceTilt = params.clearanceTilt;
  plan.burnTime = propellant / params.mass_flow();
  RobotState start;
  start.propellant = propellant;
  FlightOptions opt;
  opt.dt = dt;
  opt.maxDuration = 1e6;

  VerticalReach out;
  out.body = body;
  const FlightEnd atHop = integrate(launch_state(start, plan), params, body, plan, {}, opt,
                                    StopRule::FixedDuration, hopTime, false);
  out.atHopTime = atHop.last.position.z();
  const FlightEnd apex = integrate(launch_state(start, plan), params, body, plan, {}, opt,
                                   StopRule::Apex, 0.0, false);
  out.apex = apex.last.position.z();
  out.apexTime = apex.t;
  return out;
}

}  // namespace cliffsim::dynamics
