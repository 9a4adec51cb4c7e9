#pragma once

// Tension-only spring tethers between robots and an optional massless hub,
// the quasi-static hub solve, and the per-robot slip condition.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cliffsim/common.hpp"
#include "cliffsim/dynamics.hpp"
#include "cliffsim/grip.hpp"

namespace cliffsim::tether {

struct TetherSpec {
  double stiffness = 200.0;  ///< [N/m]
  double restLength = 1.8;   ///< [m]
  double damping = 0.0;      ///< [N s/m], along the tether only
};

void validate(const TetherSpec& spec);

/// Force on end A. relVel is vB - vA. Zero while slack; when taut the
/// tension k (l - L) + c dl/dt is clipped at zero so the tether never pushes.
Vec3 tether_force(const TetherSpec& spec, const Vec3& endA, const Vec3& endB,
                  const Vec3& relVel = Vec3::Zero());

struct Edge {
  int a = 0;
  int b = 0;
  TetherSpec spec;
};

/// Nodes 0..robotCount-1 are robots; when hasHub, node robotCount is the
/// massless hub.
struct TetherSystem {
  int robotCount = 0;
  bool hasHub = false;
  std::vector<Edge> edges;

  int node_count() const { return robotCount + (hasHub ? 1 : 0); }
  int hub() const { return robotCount; }
  void validate() const;
  std::string node_name(int node) const;
  /// "r1".."rN" or "hub".
  int node_index(const std::string& name) const;
};

/// Every robot tethered to a central hub (the "X" for four robots).
TetherSystem hub_and_spoke(int robots, const TetherSpec& spec);

/// Tether force on every node; velocities may be empty (no damping).
std::vector<Vec3> node_forces(const TetherSystem& system, std::span<const Vec3> positions,
                              std::span<const Vec3> velocities = {});

/// Stored spring energy, sum of k/2 (l - L)+^2.
double spring_energy(const TetherSystem& system, std::span<const Vec3> positions);

struct HubSolution {
  Vec3 position = Vec3::Zero();
  double residual = 0.0;  ///< |net tether force on the hub| [N]
  int iterations = 0;
};

/// Hub position minimising the stored energy for fixed robots. When every
/// hub tether can go slack the minimiser is a set; the point nearest the
/// robots' centroid is returned. Throws ConvergenceError after 100 Newton
/// iterations.
HubSolution solve_hub(const TetherSystem& system, std::span<const Vec3> robotPositions,
                      std::optional<Vec3> warmStart = std::nullopt);

/// Hub velocity implied by robot velocities at a solved configuration.
Vec3 hub_velocity(const TetherSystem& system, std::span<const Vec3> robotPositions,
                  const Vec3& hub, std::span<const Vec3> robotVelocities);

/// Node positions with the hub filled in.
std::vector<Vec3> with_hub(const TetherSystem& system, std::span<const Vec3> robotPositions,
                           std::optional<Vec3> warmStart = std::nullopt);

using FreeMask = std::array<bool, 3>;

struct EquilibriumResult {
  std::vector<Vec3> positions;
  double residual = 0.0;  ///< max |dE/dq| over free coordinates [N]
  int iterations = 0;
};

/// Minimise spring energy minus the work of constant nodal loads over the
/// free coordinates (e.g. robots hanging under gravity). The hub is always
/// free. Throws ConvergenceError if the force residual stays above
/// `tolerance`.
EquilibriumResult static_equilibrium(const TetherSystem& system, std::vector<Vec3> positions,
                                     const std::vector<FreeMask>& free,
                                     const std::vector<Vec3>& loads, double tolerance = 1e-6);

struct RobotLoads {
  Vec3 gravity = Vec3::Zero();  ///< F_g
  Vec3 tether = Vec3::Zero();   ///< F_s
};

/// Gravity and summed tether force on one robot. `positions` covers every
/// node, hub included.
RobotLoads net_robot_force(const TetherSystem& system, int robot,
                           std::span<const Vec3> positions, double mass,
                           const dynamics::Body& body, std::span<const Vec3> velocities = {});

enum class Equilibrium { Holds, Slips };
const char* to_string(Equilibrium e);

/// Holds iff |F_g + F_s| <= total grip capacity (boundary inclusive).
Equilibrium check_equilibrium(const grip::GripState& grip, const Vec3& fg, const Vec3& fs);

/// Stricter variant: the load's wall-tangential part must fit the capacity
/// and its outward pull must fit normalRatio times the capacity.
Equilibrium check_equilibrium_strict(const grip::GripState& grip, const Vec3& fg,
                                     const Vec3& fs, const Vec3& outwardNormal,
                                     double normalRatio);

/// Lowest height a slipping robot can reach while energy is conserved or
/// dissipated: min z such that m g z + S(q) <= E0 for some placement of
/// its x, y and the hub, other robots fixed. E0 includes its kinetic energy.
double slip_energy_floor(const TetherSystem& system, std::span<const Vec3> positions,
                         int robot, double mass, const Vec3& velocity,
                         const dynamics::Body& body);

}  // namespace cliffsim::tether
