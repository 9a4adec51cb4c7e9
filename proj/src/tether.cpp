#include "cliffsim/tether.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cliffsim::tether {

void validate(const TetherSpec& s) {
  if (!(s.stiffness > 0.0)) throw DomainError("tether: stiffness must be positive");
  if (!(s.restLength > 0.0)) throw DomainError("tether: restLength must be positive");
  if (!(s.damping >= 0.0)) throw DomainError("tether: damping must be non-negative");
}

Vec3 tether_force(const TetherSpec& spec, const Vec3& endA, const Vec3& endB,
                  const Vec3& relVel) {
  const Vec3 d = endB - endA;
  const double len = d.norm();
  if (!(len > 0.0)) throw DomainError("tether_force: coincident endpoints");
  if (len <= spec.restLength) return Vec3::Zero();
  const Vec3 u = d / len;
  const double tension =
      std::max(0.0, spec.stiffness * (len - spec.restLength) + spec.damping * relVel.dot(u));
  return tension * u;
}

void TetherSystem::validate() const {
  if (robotCount < 1) throw DomainError("tether system: needs at least one robot");
  const int n = node_count();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n) throw DomainError("tether system: edge endpoint out of range");
    if (e.a == e.b) throw DomainError("tether system: self-loop edge");
    tether::validate(e.spec);
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  if (hasHub && adj[hub()].size() < 2) throw DomainError("tether system: hub needs at least two tethers");
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  if (n > 1 && std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DomainError("tether system: topology is not connected");
  }
}

std::string TetherSystem::node_name(int node) const {
  if (hasHub && node == hub()) return "hub";
  return "r" + std::to_string(node + 1);
}

int TetherSystem::node_index(const std::string& name) const {
  if (name == "hub") {
    if (!hasHub) throw DomainError("tether system: no hub node");
    return hub();
  }
  if (name.size() >= 2 && name[0] == 'r') {
    try {
      std::size_t used = 0;
      const int i = std::stoi(name.substr(1), &used);
      if (used == name.size() - 1 && i >= 1 && i <= robotCount) return i - 1;
    } catch (const std::exception&) {
    }
  }
  throw DomainError("tether system: unknown node '" + name + "'");
}

TetherSystem hub_and_spoke(int robots, const TetherSpec& spec) {
  TetherSystem sys;
  sys.robotCount = robots;
  sys.hasHub = true;
  for (int i = 0; i < robots; ++i) sys.edges.push_back({i, robots, spec});
  sys.validate();
  return sys;
}

std::vector<Vec3> node_forces(const TetherSystem& system, std::span<const Vec3> positions,
                              std::span<const Vec3> velocities) {
  if (static_cast<int>(positions.size()) != system.node_count()) {
    throw DomainError("node_forces: position count does not match node count");
  }
  const bool damped = !velocities.empty();
  if (damped && velocities.size() != positions.size()) {
    throw DomainError("node_forces: velocity count does not match node count");
  }
  std::vector<Vec3> f(positions.size(), Vec3::Zero());
  for (const auto& e : system.edges) {
    const Vec3 rel = damped ? Vec3(velocities[e.b] - velocities[e.a]) : Vec3::Zero();
    const Vec3 fa = tether_force(e.spec, positions[e.a], positions[e.b], rel);
    f[e.a] += fa;
    f[e.b] -= fa;
  }
  return f;
}

double spring_energy(const TetherSystem& system, std::span<const Vec3> positions) {
  double energy = 0.0;
  for (const auto& e : system.edges) {
    const double stretch = (positions[e.b] - positions[e.a]).norm() - e.spec.restLength;
    if (stretch > 0.0) energy += 0.5 * e.spec.stiffness * stretch * stretch;
  }
  return energy;
}

namespace {

Eigen::Matrix3d edge_stiffness(const TetherSpec& spec, const Vec3& d) {
  const double len = d.norm();
  if (len <= spec.restLength) return Eigen::Matrix3d::Zero();
  const Vec3 u = d / len;
  const Eigen::Matrix3d uu = u * u.transpose();
  return spec.stiffness * ((1.0 - spec.restLength / len) * (Eigen::Matrix3d::Identity() - uu) + uu);
}

struct Minimiser {
  const TetherSystem& system;
  const std::vector<FreeMask>& free;
  const std::vector<Vec3>& loads;
  std::vector<int> var;  // node*3+axis -> variable index or -1
  int nvar = 0;
  // Weak pull of every free node towards an anchor (the hub towards its
  // neighbours' centroid, robots towards their start) so slack directions
  // have a unique minimiser.
  double reg = 0.0;
  std::vector<Vec3> anchor;

  Minimiser(const TetherSystem& sys, const std::vector<FreeMask>& fr, const std::vector<Vec3>& ld,
            const std::vector<Vec3>& start, bool regularise = true)
      : system(sys), free(fr), loads(ld) {
    const int n = sys.node_count();
    var.assign(3 * n, -1);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        const bool isFree = (sys.hasHub && i == sys.hub()) || fr[i][a];
        if (isFree) var[3 * i + a] = nvar++;
      }
    }
    anchor = start;
    double kmax = 0.0;
    for (const auto& e : sys.edges) kmax = std::max(kmax, e.spec.stiffness);
    reg = regularise ? 1e-10 * kmax : 0.0;
    if (sys.hasHub) {
      Vec3 c = Vec3::Zero();
      int deg = 0;
      for (const auto& e : sys.edges) {
        if (e.a == sys.hub() || e.b == sys.hub()) {
          c += start[e.a == sys.hub() ? e.b : e.a];
          ++deg;
        }
      }
      anchor[sys.hub()] = c / std::max(deg, 1);
    }
  }

  double energy(const std::vector<Vec3>& x) const {
    double e = spring_energy(system, x);
    for (std::size_t i = 0; i < x.size(); ++i) e -= loads[i].dot(x[i]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        if (var[3 * i + a] >= 0) e += 0.5 * reg * (x[i][a] - anchor[i][a]) * (x[i][a] - anchor[i][a]);
      }
    }
    return e;
  }

  // Gradient and Hessian over free variables; `physical` receives the
  // gradient without the hub regulariser.
  void derivatives(const std::vector<Vec3>& x, Eigen::VectorXd& g, Eigen::MatrixXd& h,
                   Eigen::VectorXd& physical) const {
    const int n = system.node_count();
    std::vector<Vec3> grad(n, Vec3::Zero());
    for (int i = 0; i < n; ++i) grad[i] = -loads[i];
    h.setZero(nvar, nvar);
    auto add_block = [&](int p, int q, const Eigen::Matrix3d& k) {
      for (int r = 0; r < 3; ++r) {
        const int vr = var[3 * p + r];
        if (vr < 0) continue;
        for (int c = 0; c < 3; ++c) {
          const int vc = var[3 * q + c];
          if (vc >= 0) h(vr, vc) += k(r, c);
        }
      }
    };
    for (const auto& e : system.edges) {
      const Vec3 d = x[e.b] - x[e.a];
      const double len = d.norm();
      if (len <= e.spec.restLength) continue;
      const Vec3 t = e.spec.stiffness * (len - e.spec.restLength) * d / len;
      grad[e.a] -= t;
      grad[e.b] += t;
      const Eigen::Matrix3d k = edge_stiffness(e.spec, d);
      add_block(e.a, e.a, k);
      add_block(e.b, e.b, k);
      add_block(e.a, e.b, -k);
      add_block(e.b, e.a, -k);
    }
    g.setZero(nvar);
    physical.setZero(nvar);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        const int v = var[3 * i + a];
        if (v >= 0) physical(v) = grad[i][a];
      }
    }
    g = physical;
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 3; ++a) {
        const int v = var[3 * i + a];
        if (v < 0) continue;
        g(v) += reg * (x[i][a] - anchor[i][a]);
        h(v, v) += reg;
      }
    }
  }

  std::vector<Vec3> moved(const std::vector<Vec3>& x, const Eigen::VectorXd& step) const {
    std::vector<Vec3> y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        const int v = var[3 * i + a];
        if (v >= 0) y[i][a] += step(v);
      }
    }
    return y;
  }

  // Levenberg-damped Newton with an Armijo acceptance test.
  EquilibriumResult run(std::vector<Vec3> x, int maxIterations, double tol,
                        double acceptTol) const {
    EquilibriumResult out;
    if (nvar == 0) {
      out.positions = std::move(x);
      return out;
    }
    double kscale = 0.0;
    for (const auto& e : system.edges) kscale = std::max(kscale, e.spec.stiffness);
    double mu = 1e-9 * kscale;
    const double muMin = 1e-14 * kscale;
    Eigen::VectorXd g, physical;
    Eigen::MatrixXd h;
    double phi = energy(x);
    for (int it = 0; it < maxIterations; ++it) {
      derivatives(x, g, h, physical);
      out.iterations = it;
      if (g.lpNorm<Eigen::Infinity>() < tol) {
        out.positions = std::move(x);
        out.residual = physical.lpNorm<Eigen::Infinity>();
        return out;
      }
      bool accepted = false;
      while (mu < 1e30) {
        const Eigen::MatrixXd a = h + mu * Eigen::MatrixXd::Identity(nvar, nvar);
        const Eigen::VectorXd step = a.ldlt().solve(-g);
        const std::vector<Vec3> trial = moved(x, step);
        const double phiTrial = energy(trial);
        bool ok = std::isfinite(phiTrial) && phiTrial <= phi + 1e-4 * g.dot(step);
        if (!ok && std::isfinite(phiTrial)) {
          // Near the minimum energy changes drown in round-off; fall back
          // to requiring a smaller gradient.
          Eigen::VectorXd gt, pt;
          Eigen::MatrixXd ht;
          derivatives(trial, gt, ht, pt);
          ok = gt.lpNorm<Eigen::Infinity>() < 0.5 * g.lpNorm<Eigen::Infinity>();
        }
        if (ok) {
          x = trial;
          phi = phiTrial;
          mu = std::max(muMin, mu * 0.1);
          accepted = true;
          break;
        }
        // Round-off floor: no representable decrease left.
        if (step.lpNorm<Eigen::Infinity>() < 1e-15) break;
        mu *= 10.0;
      }
      if (!accepted) break;
    }
    derivatives(x, g, h, physical);
    out.positions = std::move(x);
    out.residual = physical.lpNorm<Eigen::Infinity>();
    out.iterations = maxIterations;
    if (out.residual < acceptTol) return out;
    throw ConvergenceError("tether equilibrium did not converge", out.residual);
  }
};

std::vector<FreeMask> all_fixed(const TetherSystem& system) {
  return std::vector<FreeMask>(system.node_count(), FreeMask{false, false, false});
}

}  // namespace

namespace {

// Dykstra's alternating projections: nearest point to `start` inside the
// intersection of the balls |h - centre_i| <= radius_i.
Vec3 project_onto_balls(const Vec3& start, const std::vector<Vec3>& centres,
                        const std::vector<double>& radii) {
  Vec3 x = start;
  std::vector<Vec3> inc(centres.size(), Vec3::Zero());
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const Vec3 before = x;
    for (std::size_t i = 0; i < centres.size(); ++i) {
      const Vec3 y = x + inc[i];
      const Vec3 d = y - centres[i];
      const double len = d.norm();
      const Vec3 p = len > radii[i] ? Vec3(centres[i] + d * (radii[i] / len)) : y;
      inc[i] = y - p;
      x = p;
    }
    if ((x - before).norm() < 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace

HubSolution solve_hub(const TetherSystem& system, std::span<const Vec3> robotPositions,
                      std::optional<Vec3> warmStart) {
  if (!system.hasHub) throw DomainError("solve_hub: topology has no hub");
  if (static_cast<int>(robotPositions.size()) != system.robotCount) {
    throw DomainError("solve_hub: robot count mismatch");
  }
  std::vector<Vec3> x(robotPositions.begin(), robotPositions.end());
  std::vector<Vec3> centres;
  std::vector<double> radii;
  for (const auto& e : system.edges) {
    if (e.a == system.hub() || e.b == system.hub()) {
      centres.push_back(x[e.a == system.hub() ? e.b : e.a]);
      radii.push_back(e.spec.restLength);
    }
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : centres) centroid += p;
  centroid /= static_cast<double>(centres.size());

  auto max_stretch = [&](const Vec3& h) {
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centres.size(); ++i) s = std::max(s, (h - centres[i]).norm() - radii[i]);
    return s;
  };
  const std::vector<Vec3> robotsOnly = x;
  auto residual = [&](const Vec3& h) {
    std::vector<Vec3> nodes = robotsOnly;
    nodes.push_back(h);
    return node_forces(system, nodes)[system.hub()].norm();
  };
  if (max_stretch(centroid) <= 0.0) return {centroid, residual(centroid), 0};

  // Some hub tether must be taut at the centroid. If every placement
  // stretches something, the energy minimiser is unique; otherwise take the
  // slack point nearest the centroid.
  x.push_back(warmStart ? *warmStart : centroid);
  const auto free = all_fixed(system);
  const std::vector<Vec3> loads(x.size(), Vec3::Zero());
  const Minimiser m(system, free, loads, x, false);
  const EquilibriumResult r = m.run(std::move(x), 100, 1e-10, 1e-6);
  const Vec3 h = r.positions[system.hub()];
  if (max_stretch(h) > 1e-9) return {h, r.residual, r.iterations};
  const Vec3 p = project_onto_balls(centroid, centres, radii);
  return {p, residual(p), r.iterations};
}

Vec3 hub_velocity(const TetherSystem& system, std::span<const Vec3> robotPositions,
                  const Vec3& hub, std::span<const Vec3> robotVelocities) {
  if (!system.hasHub) throw DomainError("hub_velocity: topology has no hub");
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  Vec3 rhs = Vec3::Zero();
  Vec3 meanVel = Vec3::Zero();
  double kmax = 0.0;
  int deg = 0;
  for (const auto& e : system.edges) {
    if (e.a != system.hub() && e.b != system.hub()) continue;
    const int other = e.a == system.hub() ? e.b : e.a;
    const Eigen::Matrix3d ke = edge_stiffness(e.spec, hub - robotPositions[other]);
    k += ke;
    rhs += ke * robotVelocities[other];
    meanVel += robotVelocities[other];
    kmax = std::max(kmax, e.spec.stiffness);
    ++deg;
  }
  const double reg = 1e-10 * kmax;
  k += reg * Eigen::Matrix3d::Identity();
  rhs += reg * meanVel / std::max(deg, 1);
  return k.ldlt().solve(rhs);
}

std::vector<Vec3> with_hub(const TetherSystem& system, std::span<const Vec3> robotPositions,
                           std::optional<Vec3> warmStart) {
  std::vector<Vec3> x(robotPositions.begin(), robotPositions.end());
  if (system.hasHub) x.push_back(solve_hub(system, robotPositions, warmStart).position);
  return x;
}

EquilibriumResult static_equilibrium(const TetherSystem& system, std::vector<Vec3> positions,
                                     const std::vector<FreeMask>& free,
                                     const std::vector<Vec3>& loads, double tolerance) {
  const auto n = static_cast<std::size_t>(system.node_count());
  if (positions.size() != n || free.size() != n || loads.size() != n) {
    throw DomainError("static_equilibrium: size mismatch");
  }
  const Minimiser m(system, free, loads, positions);
  return m.run(std::move(positions), 500, std::min(1e-9, tolerance), tolerance);
}

RobotLoads net_robot_force(const TetherSystem& system, int robot,
                           std::span<const Vec3> positions, double mass,
                           const dynamics::Body& body, std::span<const Vec3> velocities) {
  if (robot < 0 || robot >= system.robotCount) throw DomainError("net_robot_force: bad robot index");
  RobotLoads loads;
  loads.gravity = Vec3(0.0, 0.0, -mass * body.gravity);
  loads.tether = node_forces(system, positions, velocities)[robot];
  return loads;
}

const char* to_string(Equilibrium e) { return e == Equilibrium::Holds ? "HOLDS" : "SLIPS"; }

Equilibrium check_equilibrium(const grip::GripState& grip, const Vec3& fg, const Vec3& fs) {
  return (fg + fs).norm() <= grip.totalCapacity ? Equilibrium::Holds : Equilibrium::Slips;
}

Equilibrium check_equilibrium_strict(const grip::GripState& grip, const Vec3& fg,
                                     const Vec3& fs, const Vec3& outwardNormal,
                                     double normalRatio) {
  if (!(outwardNormal.norm() > 0.0)) throw DomainError("check_equilibrium_strict: zero normal");
  if (!(normalRatio >= 0.0)) throw DomainError("check_equilibrium_strict: negative ratio");
  const Vec3 n = outwardNormal.normalized();
  const Vec3 load = fg + fs;
  const double pull = std::max(0.0, load.dot(n));
  const double tangential = (load - load.dot(n) * n).norm();
  const bool ok = tangential <= grip.totalCapacity && pull <= normalRatio * grip.totalCapacity;
  return ok ? Equilibrium::Holds : Equilibrium::Slips;
}

double slip_energy_floor(const TetherSystem& system, std::span<const Vec3> positions,
                         int robot, double mass, const Vec3& velocity,
                         const dynamics::Body& body) {
  if (robot < 0 || robot >= system.robotCount) throw DomainError("slip_energy_floor: bad robot index");
  bool attached = false;
  for (const auto& e : system.edges) attached = attached || e.a == robot || e.b == robot;
  if (!attached) throw DomainError("slip_energy_floor: robot has no tether, fall is unbounded");

  std::vector<Vec3> x(positions.begin(), positions.end());
  const double weight = mass * body.gravity;
  const double e0 = weight * x[robot].z() + spring_energy(system, x) +
                    0.5 * mass * velocity.squaredNorm();
  auto free = all_fixed(system);
  free[robot] = FreeMask{true, true, false};
  const std::vector<Vec3> loads(x.size(), Vec3::Zero());

  std::vector<Vec3> guess = x;
  auto excess = [&](double z) {
    guess[robot].z() = z;
    const EquilibriumResult r = static_equilibrium(system, guess, free, loads, 1e-5);
    guess = r.positions;
    return weight * z + spring_energy(system, r.positions) - e0;
  };

  double hi = x[robot].z();
  double step = 1.0;
  double lo = hi - step;
  while (excess(lo) <= 0.0) {
    hi = lo;
    step *= 2.0;
    lo -= step;
    if (step > 1e6) throw ConvergenceError("slip_energy_floor: no lower bound found", step);
  }
  for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace cliffsim::tether
