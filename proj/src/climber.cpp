#include "cliffsim/climber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "cliffsim/rng.hpp"

namespace cliffsim::climber {

using dynamics::Mode;
using dynamics::RobotState;

void validate(const ClimbScenario& s) {
  if (s.robotCount < 2) throw DomainError("climb: need at least two robots");
  if (!(s.hopBatch >= 1 && s.hopBatch < s.robotCount)) {
    throw DomainError("climb: hopBatch must satisfy 1 <= n < N");
  }
  if (static_cast<int>(s.initialPositions.size()) != s.robotCount) {
    throw DomainError("climb: one initial position per robot required");
  }
  for (int i = 0; i < s.robotCount; ++i) {
    if (std::abs(s.initialPositions[i].y()) > 1e-9) {
      throw DomainError("climb: robots start on the wall plane y = 0");
    }
    for (int j = 0; j < i; ++j) {
      if ((s.initialPositions[i] - s.initialPositions[j]).norm() < 1e-9) {
        throw DomainError("climb: initial positions must be distinct");
      }
    }
  }
  if (!(s.hopDistance >= 0.0)) throw DomainError("climb: hopDistance must be non-negative");
  if (s.spinesPerRobot < 1) throw DomainError("climb: spinesPerRobot must be positive");
  if (s.retryLimit < 0) throw DomainError("climb: retryLimit must be non-negative");
  if (!(s.settleSpeed > 0.0 && s.maxSettleTime > 0.0)) throw DomainError("climb: bad settle limits");
  if (!(s.wallDrag >= 0.0)) throw DomainError("climb: wallDrag must be non-negative");
  if (!(s.dt > 0.0 && s.logInterval > 0.0)) throw DomainError("climb: dt and logInterval must be positive");
  if (!s.gaitOrder.empty()) {
    std::vector<int> sorted = s.gaitOrder;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(s.robotCount);
    std::iota(expect.begin(), expect.end(), 0);
    if (sorted != expect) throw DomainError("climb: gaitOrder must be a permutation of robot indices");
  }
  for (const auto& inj : s.injections) {
    if (inj.robot < 0 || inj.robot >= s.robotCount || inj.cycle < 0) {
      throw DomainError("climb: failure injection index out of range");
    }
  }
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::HopStart: return "HOP_START";
    case EventKind::GripOk: return "GRIP_OK";
    case EventKind::GripFail: return "GRIP_FAIL";
    case EventKind::Slip: return "SLIP";
    case EventKind::Recovered: return "RECOVERED";
  }
  return "?";
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "COMPLETED";
    case RunStatus::Recovered: return "RECOVERED";
    case RunStatus::Partial: return "PARTIAL";
    case RunStatus::Failed: return "FAILED";
  }
  return "?";
}

double ClimbLog::total_propellant() const {
  return std::accumulate(propellantUsed.begin(), propellantUsed.end(), 0.0);
}

double static_share(int robots, int batch, double mass, double gravity) {
  if (!(robots > batch && batch >= 0)) throw DomainError("static_share: need N > n");
  return robots * mass * gravity / (robots - batch);
}

namespace {

struct Mover {
  int robot = 0;
  bool hopping = false;
  dynamics::HopPlan plan;
  double t0 = 0.0;
  double targetZ = 0.0;
};

/// Run was stopped by the gait logic rather than by an exception.
struct Stop {
  RunStatus status;
  std::string message;
};

// Coupled fixed-step RK4 over all moving robots. Gripping robots are
// fixed; the massless hub is re-solved at every stage.
class Engine {
 public:
  explicit Engine(const ClimbSetup& setup) : setup_(setup) {}

  const ClimbSetup& setup_;
  std::vector<RobotState> robots;
  Vec3 hub = Vec3::Zero();
  double t = 0.0;
  std::vector<Mover> movers;

  bool recording = true;
  std::vector<Sample> samples;
  double nextSample = 0.0;
  std::vector<double> minZ;
  double peakAnchorLoad = 0.0;

  struct Trial {
    std::vector<RobotState> robots;
    Vec3 hub = Vec3::Zero();
    std::vector<Vec3> forces;  // tether force per robot at the end state
  };

  std::vector<Vec3> positions() const {
    std::vector<Vec3> p;
    for (const auto& r : robots) p.push_back(r.position);
    return p;
  }

  std::vector<Vec3> nodes_with_hub(const std::vector<RobotState>& st, Vec3& hubGuess) const {
    std::vector<Vec3> p;
    for (const auto& r : st) p.push_back(r.position);
    if (setup_.tethers.hasHub) {
      hubGuess = tether::solve_hub(setup_.tethers, p, hubGuess).position;
      p.push_back(hubGuess);
    }
    return p;
  }

  std::vector<Vec3> tether_forces(const std::vector<RobotState>& st, Vec3& hubGuess) const {
    const std::vector<Vec3> nodes = nodes_with_hub(st, hubGuess);
    std::vector<Vec3> vel;
    for (const auto& r : st) vel.push_back(r.velocity);
    if (setup_.tethers.hasHub) {
      const std::vector<Vec3> rp(nodes.begin(), nodes.end() - 1);
      vel.push_back(tether::hub_velocity(setup_.tethers, rp, hubGuess, std::vector<Vec3>(vel)));
    }
    std::vector<Vec3> f = tether::node_forces(setup_.tethers, nodes, vel);
    f.resize(st.size());
    return f;
  }

  Vec3 drag(const Mover& m, const RobotState& s) const {
    return m.hopping ? Vec3::Zero() : Vec3(-setup_.scenario.wallDrag * s.velocity);
  }

  bool burning(const Mover& m, double at) const {
    return m.hopping && (at - m.t0) < m.plan.burnTime - 1e-12;
  }

  // One RK4 step of length h from the current state.
  Trial trial_step(double h) const {
    const auto& p = setup_.robot;
    std::vector<dynamics::AttitudeSetpoint> sp;
    std::vector<double> level;
    for (const auto& m : movers) {
      sp.push_back(m.hopping ? m.plan.setpoint(t - m.t0, p) : dynamics::AttitudeSetpoint{});
      level.push_back(burning(m, t) ? 1.0 : 0.0);
    }
    Vec3 hubGuess = hub;
    auto rates = [&](const std::vector<RobotState>& st) {
      const std::vector<Vec3> f = tether_forces(st, hubGuess);
      std::vector<dynamics::StateRate> out;
      for (std::size_t k = 0; k < movers.size(); ++k) {
        const RobotState& s = st[movers[k].robot];
        out.push_back(dynamics::state_rate(s, p, setup_.body, sp[k], level[k],
                                           f[movers[k].robot] + drag(movers[k], s)));
      }
      return out;
    };
    auto moved = [&](const std::vector<RobotState>& base,
                     const std::vector<dynamics::StateRate>& r, double step) {
      std::vector<RobotState> out = base;
      for (std::size_t k = 0; k < movers.size(); ++k) {
        out[movers[k].robot] = dynamics::advance(base[movers[k].robot], r[k], step);
      }
      return out;
    };
    const auto k1 = rates(robots);
    const auto k2 = rates(moved(robots, k1, 0.5 * h));
    const auto k3 = rates(moved(robots, k2, 0.5 * h));
    const auto k4 = rates(moved(robots, k3, h));
    Trial tr;
    tr.robots = moved(moved(moved(moved(robots, k1, h / 6.0), k2, h / 3.0), k3, h / 3.0), k4, h / 6.0);
    for (const auto& m : movers) {
      RobotState& s = tr.robots[m.robot];
      s.attitude.normalize();
      s.propellant = std::max(0.0, s.propellant);
    }
    tr.hub = hubGuess;
    tr.forces = tether_forces(tr.robots, tr.hub);
    return tr;
  }

  void sample_now() {
    if (!recording) return;
    Sample s;
    s.t = t;
    for (const auto& r : robots) {
      s.robots.push_back(r.position);
      s.modes.push_back(r.mode);
      s.center += r.position;
    }
    s.center /= static_cast<double>(robots.size());
    s.hub = hub;
    samples.push_back(std::move(s));
  }

  void commit(Trial&& tr, double h) {
    robots = std::move(tr.robots);
    hub = tr.hub;
    t += h;
    for (std::size_t i = 0; i < robots.size(); ++i) {
      minZ[i] = std::min(minZ[i], robots[i].position.z());
      if (robots[i].mode == Mode::Anchored) {
        const double w = setup_.robot.mass * setup_.body.gravity;
        peakAnchorLoad = std::max(peakAnchorLoad, (tr.forces[i] - Vec3(0, 0, w)).norm());
      }
    }
    while (recording && t >= nextSample - 1e-9) {
      sample_now();
      nextSample += setup_.scenario.logInterval;
    }
  }

  double step_size() const {
    double h = setup_.scenario.dt;
    for (const auto& m : movers) {
      const double end = m.t0 + m.plan.burnTime;
      if (m.hopping && t < end - 1e-12 && end < t + h) h = end - t;
    }
    return h;
  }

  // Integrate until a hopping mover descends through its target height (or
  // peaks below it). Returns the landed mover's position in `movers`.
  std::size_t run_to_landing() {
    const double limit = t + 1e4;
    while (t < limit) {
      const double h = step_size();
      Trial tr = trial_step(h);
      double best = std::numeric_limits<double>::infinity();
      std::size_t who = movers.size();
      Trial bestTrial;
      for (std::size_t k = 0; k < movers.size(); ++k) {
        const Mover& m = movers[k];
        if (!m.hopping || burning(m, t + h - 1e-12)) continue;
        const RobotState& prev = robots[m.robot];
        const RobotState& next = tr.robots[m.robot];
        if (!(next.velocity.z() <= 0.0 && next.position.z() <= m.targetZ)) continue;
        const bool fromAbove = prev.position.z() > m.targetZ;
        auto g = [&](const Trial& x) {
          const RobotState& s = x.robots[m.robot];
          return fromAbove ? s.position.z() - m.targetZ : s.velocity.z();
        };
        double lo = 0.0, hi = h;
        Trial hiTrial = tr;
        for (int it = 0; it < 50; ++it) {
          const double mid = 0.5 * (lo + hi);
          Trial mt = trial_step(mid);
          if (g(mt) > 0.0) {
            lo = mid;
          } else {
            hi = mid;
            hiTrial = std::move(mt);
          }
        }
        if (hi < best) {
          best = hi;
          who = k;
          bestTrial = std::move(hiTrial);
        }
      }
      if (who < movers.size()) {
        commit(std::move(bestTrial), best);
        return who;
      }
      commit(std::move(tr), h);
    }
    throw ConvergenceError("climb: hop did not come down", t);
  }

  // Integrate sliding robots until they come to rest, then place them at
  // the hanging equilibrium.
  void settle() {
    const auto& sc = setup_.scenario;
    const double start = t;
    const double m = setup_.robot.mass;
    const double g = setup_.body.gravity;
    while (true) {
      if (t - start > sc.maxSettleTime) {
        throw ConvergenceError("climb: sliding robot did not come to rest", t - start);
      }
      Trial tr = trial_step(sc.dt);
      bool still = true;
      for (const auto& mv : movers) {
        const RobotState& s = tr.robots[mv.robot];
        const Vec3 accel = (tr.forces[mv.robot] + drag(mv, s)) / m - g * Vec3::UnitZ();
        if (s.velocity.norm() >= sc.settleSpeed || accel.norm() >= 10.0 * sc.settleSpeed) still = false;
      }
      commit(std::move(tr), sc.dt);
      if (still) break;
    }
    std::vector<Vec3> x = positions();
    if (setup_.tethers.hasHub) x.push_back(hub);
    std::vector<tether::FreeMask> free(x.size(), tether::FreeMask{false, false, false});
    std::vector<Vec3> loads(x.size(), Vec3::Zero());
    for (const auto& mv : movers) {
      free[mv.robot] = tether::FreeMask{true, true, true};
      loads[mv.robot] = Vec3(0.0, 0.0, -m * g);
    }
    const auto eq = tether::static_equilibrium(setup_.tethers, x, free, loads);
    for (const auto& mv : movers) {
      robots[mv.robot].position = eq.positions[mv.robot];
      robots[mv.robot].velocity.setZero();
      robots[mv.robot].angularVelocity.setZero();
      minZ[mv.robot] = std::min(minZ[mv.robot], robots[mv.robot].position.z());
    }
    if (setup_.tethers.hasHub) hub = eq.positions.back();
  }
};

class Climb {
 public:
  explicit Climb(const ClimbSetup& setup) : setup_(setup), engine_(setup) {}

  ClimbLog run(int cycles);

 private:
  const ClimbSetup& setup_;
  Engine engine_;
  ClimbLog log_;
  std::vector<grip::GripState> grips_;
  std::vector<int> landings_;
  std::optional<grip::SpineArray> array_;
  std::set<std::pair<int, int>> injected_;

  double share() const {
    const auto& s = setup_.scenario;
    return static_share(s.robotCount, s.hopBatch, setup_.robot.mass, setup_.body.gravity);
  }

  void event(EventKind kind, int robot, int cycle, double capacity = 0.0) {
    log_.events.push_back({engine_.t, robot, cycle, kind, engine_.robots[robot].position, capacity});
  }

  grip::GripState sample_grip(int robot) {
    const auto& sc = setup_.scenario;
    const auto& gm = setup_.grip;
    const int landing = landings_[robot]++;
    const std::uint64_t seed = rng::derive_seed(sc.seed, static_cast<std::uint64_t>(robot),
                                                static_cast<std::uint64_t>(landing));
    if (gm.engagement == Engagement::All) {
      const rng::Stream cap(seed, "climb.capacity");
      std::vector<double> contacts;
      for (int j = 0; j < sc.spinesPerRobot; ++j) {
        contacts.push_back(gm.band.fixed ? *gm.band.fixed
                                         : cap.uniform(gm.band.min, gm.band.max,
                                                       static_cast<std::uint64_t>(j)));
      }
      return grip::make_grip_state(std::move(contacts));
    }
    if (!array_) {
      array_ = grip::make_spine_array(sc.spinesPerRobot, gm.tipRadiusMin, gm.tipRadiusMax,
                                      gm.spine, setup_.robot.diameter);
    }
    // Wall coordinates (x, z) map onto the terrain lattice (x, y).
    const Vec3& at = engine_.robots[robot].position;
    const auto patch = terrain::generate_patch(setup_.terrain, gm.patchExtent, gm.patchSpacing,
                                               at.x(), at.z());
    const auto asperities = terrain::extract_asperities(patch);
    return grip::sample_grip(*array_, asperities, seed, gm.band);
  }

  // Anchor balance over the gripping set at the current (settled) configuration.
  void check_anchors(int cycle) {
    std::vector<Vec3> nodes = engine_.positions();
    if (setup_.tethers.hasHub) nodes.push_back(engine_.hub);
    for (int i = 0; i < setup_.scenario.robotCount; ++i) {
      if (engine_.robots[i].mode != Mode::Anchored) continue;
      const auto loads = tether::net_robot_force(setup_.tethers, i, nodes, setup_.robot.mass,
                                                 setup_.body);
      if (tether::check_equilibrium(grips_[i], loads.gravity, loads.tether) ==
          tether::Equilibrium::Slips) {
        std::ostringstream msg;
        msg << "anchored set cannot hold the system in cycle " << cycle + 1 << ": robot "
            << i + 1 << " load " << (loads.gravity + loads.tether).norm() << " N exceeds grip "
            << grips_[i].totalCapacity << " N";
        throw Stop{RunStatus::Failed, msg.str()};
      }
    }
  }

  // Predict the coupled flight, then adjust the aim point until every
  // robot lands within 0.1 mm of its target.
  std::vector<dynamics::HopPlan> plan_batch(const std::vector<int>& batch,
                                            const std::vector<Vec3>& targets) {
    std::vector<Vec3> aim = targets;
    std::vector<dynamics::HopPlan> plans;
    for (int iter = 0; iter < 8; ++iter) {
      plans.clear();
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const RobotState& s = engine_.robots[batch[b]];
        Vec3 d = aim[b] - s.position;
        d.y() = 0.0;
        try {
          plans.push_back(dynamics::plan_hop(s, setup_.robot, setup_.body, d,
                                             dynamics::Surface::Vertical));
        } catch (const dynamics::PlanningError& e) {
          throw Stop{RunStatus::Partial, std::string("robot ") + std::to_string(batch[b] + 1) +
                                             ": " + e.what()};
        }
      }
      Engine probe = engine_;
      probe.recording = false;
      launch(probe, batch, plans, targets);
      std::vector<Vec3> landed(batch.size());
      while (std::any_of(probe.movers.begin(), probe.movers.end(), [](const Mover& m) { return m.hopping; })) {
        const std::size_t k = probe.run_to_landing();
        const int r = probe.movers[k].robot;
        landed[std::find(batch.begin(), batch.end(), r) - batch.begin()] = probe.robots[r].position;
        probe.robots[r].mode = Mode::Anchored;
        probe.robots[r].velocity.setZero();
        probe.movers.erase(probe.movers.begin() + static_cast<long>(k));
      }
      double miss = 0.0;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        Vec3 e = targets[b] - landed[b];
        e.y() = 0.0;
        miss = std::max(miss, e.norm());
        aim[b] += e;
      }
      if (miss < 1e-4) break;
    }
    return plans;
  }

  static void launch(Engine& eng, const std::vector<int>& batch,
                     const std::vector<dynamics::HopPlan>& plans, const std::vector<Vec3>& targets) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      RobotState& s = eng.robots[batch[b]];
      s.attitude = plans[b].launch_attitude();
      s.angularVelocity.setZero();
      s.velocity.setZero();
      s.mode = Mode::Hopping;
      // A sliding robot re-launching leaves the mover list first.
      eng.movers.erase(std::remove_if(eng.movers.begin(), eng.movers.end(),
                                      [&](const Mover& m) { return m.robot == batch[b]; }),
                       eng.movers.end());
      eng.movers.push_back({batch[b], true, plans[b], eng.t, targets[b].z()});
    }
  }

  // Fly a batch to its targets; returns robots that failed to grip.
  std::vector<int> hop_batch(const std::vector<int>& batch, const std::vector<Vec3>& targets,
                             int cycle, bool retry) {
    const auto plans = plan_batch(batch, targets);
    for (int r : batch) event(EventKind::HopStart, r, cycle);
    launch(engine_, batch, plans, targets);
    log_.hops += static_cast<int>(batch.size());
    std::vector<int> failed;
    while (std::any_of(engine_.movers.begin(), engine_.movers.end(), [](const Mover& m) { return m.hopping; })) {
      const std::size_t k = engine_.run_to_landing();
      const int r = engine_.movers[k].robot;
      RobotState& s = engine_.robots[r];
      s.position.y() = 0.0;  // contact with the wall plane
      s.velocity.y() = 0.0;
      s.mode = Mode::Gripping;
      const bool forced = !retry && injected_.count({r, cycle}) > 0;
      grips_[r] = forced ? grip::GripState{} : sample_grip(r);
      if (grips_[r].totalCapacity >= share()) {
        s.mode = Mode::Anchored;
        s.velocity.setZero();
        s.angularVelocity.setZero();
        s.attitude.setIdentity();
        engine_.movers.erase(engine_.movers.begin() + static_cast<long>(k));
        event(EventKind::GripOk, r, cycle, grips_[r].totalCapacity);
        if (retry) event(EventKind::Recovered, r, cycle, grips_[r].totalCapacity);
      } else {
        s.mode = Mode::Slipped;
        engine_.movers[k].hopping = false;
        event(EventKind::GripFail, r, cycle, grips_[r].totalCapacity);
        failed.push_back(r);
      }
      engine_.sample_now();
    }
    return failed;
  }

  void slide(const std::vector<int>& failed, const std::vector<double>& preHopZ, int cycle) {
    if (failed.empty()) return;
    std::vector<SlipRecord> records;
    for (std::size_t f = 0; f < failed.size(); ++f) {
      const int r = failed[f];
      SlipRecord rec;
      rec.robot = r;
      rec.cycle = cycle;
      rec.preHopZ = preHopZ[f];
      rec.energyFloorZ = std::numeric_limits<double>::quiet_NaN();
      if (engine_.movers.size() == 1) {
        std::vector<Vec3> nodes = engine_.positions();
        if (setup_.tethers.hasHub) nodes.push_back(engine_.hub);
        rec.energyFloorZ = tether::slip_energy_floor(setup_.tethers, nodes, r, setup_.robot.mass,
                                                     engine_.robots[r].velocity, setup_.body);
      }
      engine_.minZ[r] = engine_.robots[r].position.z();
      records.push_back(rec);
    }
    engine_.settle();
    for (auto& rec : records) {
      rec.minZ = engine_.minZ[rec.robot];
      rec.settledZ = engine_.robots[rec.robot].position.z();
      event(EventKind::Slip, rec.robot, cycle);
      log_.slips.push_back(rec);
    }
    engine_.sample_now();
  }
};

ClimbLog Climb::run(int cycles) {
  const auto& sc = setup_.scenario;
  validate(sc);
  dynamics::validate(setup_.robot);
  dynamics::validate(setup_.body);
  setup_.tethers.validate();
  if (setup_.tethers.robotCount != sc.robotCount) throw DomainError("climb: tether system robot count mismatch");
  if (cycles < 1) throw DomainError("climb: cycles must be at least 1");
  for (const auto& inj : sc.injections) injected_.insert({inj.robot, inj.cycle});

  const int n = sc.robotCount;
  engine_.robots.resize(n);
  engine_.minZ.resize(n);
  for (int i = 0; i < n; ++i) {
    engine_.robots[i].position = sc.initialPositions[i];
    engine_.robots[i].propellant = setup_.robot.propellantBudget;
    engine_.robots[i].mode = Mode::Anchored;
    engine_.minZ[i] = sc.initialPositions[i].z();
  }
  if (setup_.tethers.hasHub) engine_.hub = tether::solve_hub(setup_.tethers, engine_.positions()).position;
  grips_.resize(n);
  landings_.assign(n, 0);
  for (int i = 0; i < n; ++i) grips_[i] = sample_grip(i);
  engine_.sample_now();
  engine_.nextSample = sc.logInterval;

  std::vector<int> order = sc.gaitOrder;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  auto center = [&] {
    Vec3 c = Vec3::Zero();
    for (const auto& r : engine_.robots) c += r.position;
    return Vec3(c / n);
  };
  log_.cycleCenters.push_back(center());

  bool anyFailure = false;
  try {
    check_anchors(0);
    for (int cycle = 0; cycle < cycles; ++cycle) {
      for (std::size_t start = 0; start < order.size(); start += sc.hopBatch) {
        const std::vector<int> batch(order.begin() + static_cast<long>(start),
                                     order.begin() + static_cast<long>(std::min(order.size(), start + sc.hopBatch)));
        if (sc.hopDistance == 0.0) continue;
        std::vector<Vec3> targets;
        std::vector<double> preHop;
        for (int r : batch) {
          targets.push_back(engine_.robots[r].position + Vec3(0.0, 0.0, sc.hopDistance));
          preHop.push_back(engine_.robots[r].position.z());
        }
        std::vector<int> failed = hop_batch(batch, targets, cycle, false);
        std::vector<int> retries(n, 0);
        while (!failed.empty()) {
          anyFailure = true;
          slide(failed, [&] {
            std::vector<double> z;
            for (int r : failed) z.push_back(preHop[std::find(batch.begin(), batch.end(), r) - batch.begin()]);
            return z;
          }(), cycle);
          check_anchors(cycle);
          std::vector<int> still;
          for (int r : failed) {
            if (++retries[r] > sc.retryLimit) {
              throw Stop{RunStatus::Partial, "robot " + std::to_string(r + 1) +
                                                 " exceeded the re-hop limit in cycle " +
                                                 std::to_string(cycle + 1)};
            }
            const Vec3 target = targets[std::find(batch.begin(), batch.end(), r) - batch.begin()];
            const auto again = hop_batch({r}, {target}, cycle, true);
            still.insert(still.end(), again.begin(), again.end());
          }
          failed = std::move(still);
        }
        check_anchors(cycle);
      }
      log_.cycleCenters.push_back(center());
    }
    log_.status = anyFailure ? RunStatus::Recovered : RunStatus::Completed;
  } catch (const Stop& stop) {
    log_.status = stop.status;
    log_.message = stop.message;
    engine_.sample_now();
  }

  log_.samples = std::move(engine_.samples);
  log_.peakAnchorLoad = engine_.peakAnchorLoad;
  log_.duration = engine_.t;
  for (const auto& r : engine_.robots) {
    log_.finalPositions.push_back(r.position);
    log_.propellantUsed.push_back(setup_.robot.propellantBudget - r.propellant);
  }
  return std::move(log_);
}

}  // namespace

ClimbLog run_climb(const ClimbSetup& setup, int cycles) {
  Climb climb(setup);
  return climb.run(cycles);
}

ClimbLog inject_failure(ClimbSetup setup, int robot, int cycle, int cycles) {
  if (robot < 0 || robot >= setup.scenario.robotCount || cycle < 0 || cycle >= cycles) {
    throw DomainError("inject_failure: index out of range");
  }
  setup.scenario.injections.push_back({robot, cycle});
  return run_climb(setup, cycles);
}

}  // namespace cliffsim::climber
