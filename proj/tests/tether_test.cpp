#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cliffsim/rng.hpp"
#include "cliffsim/tether.hpp"

using namespace cliffsim;
using namespace cliffsim::tether;

namespace {

const TetherSpec kSpec{200.0, 1.8, 0.0};

std::vector<Vec3> square() {
  return {{1.5, 0, 1.5}, {1.5, 0, 0}, {0, 0, 1.5}, {0, 0, 0}};
}

// Coarse-to-fine grid search on the hub energy; the energy is convex in
// the hub position so shrinking the box around the best node converges.
Vec3 brute_force_hub(const TetherSystem& sys, std::vector<Vec3> nodes, Vec3 centre, double half) {
  const int hub = sys.hub();
  nodes.push_back(centre);
  for (int level = 0; level < 40 && half > 1e-7; ++level) {
    Vec3 best = centre;
    double bestE = 1e300;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        for (int k = -10; k <= 10; ++k) {
          nodes[hub] = centre + half / 10.0 * Vec3(i, j, k);
          const double e = spring_energy(sys, nodes);
          if (e < bestE) bestE = e, best = nodes[hub];
        }
    centre = best;
    half *= 0.25;
  }
  return centre;
}

}  // namespace

TEST(Tether, TensionOnly) {
  const Vec3 a(0, 0, 0), b(0, 0, 2.0);
  EXPECT_EQ(tether_force(kSpec, a, Vec3(0, 0, 1.0)), Vec3::Zero());
  EXPECT_EQ(tether_force(kSpec, a, Vec3(0, 0, 1.8)), Vec3::Zero());
  EXPECT_NEAR(tether_force(kSpec, a, b).z(), 200.0 * 0.2, 1e-12);
  // Damping cannot turn tension into compression.
  const TetherSpec damped{200.0, 1.8, 500.0};
  EXPECT_EQ(tether_force(damped, a, b, Vec3(0, 0, -1.0)), Vec3::Zero());
  EXPECT_NEAR(tether_force(damped, a, b, Vec3(0, 0, 0.01)).z(), 40.0 + 5.0, 1e-12);
  EXPECT_THROW(validate(TetherSpec{-1.0, 1.0, 0.0}), DomainError);
}

TEST(Tether, NewtonThirdLaw) {
  const rng::Stream s(3, "tether.test");
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Vec3 a(s.uniform(-2, 2, t, 0), s.uniform(-2, 2, t, 1), s.uniform(-2, 2, t, 2));
    const Vec3 b(s.uniform(-2, 2, t, 3), s.uniform(-2, 2, t, 4), s.uniform(-2, 2, t, 5));
    const Vec3 va(s.uniform(-1, 1, t, 6), 0, 0), vb(0, s.uniform(-1, 1, t, 7), 0);
    const TetherSpec spec{150.0, 1.0, 10.0};
    const Vec3 fa = tether_force(spec, a, b, vb - va), fb = tether_force(spec, b, a, va - vb);
    EXPECT_LT((fa + fb).norm(), 1e-9);
    EXPECT_LT(fa.cross(b - a).norm(), 1e-9);  // along the tether
  }
  const auto sys = hub_and_spoke(4, kSpec);
  auto nodes = square();
  nodes.push_back(Vec3(0.3, 0.4, 0.2));
  Vec3 total = Vec3::Zero();
  for (const auto& f : node_forces(sys, nodes)) total += f;
  EXPECT_LT(total.norm(), 1e-9);
}

TEST(Tether, SystemValidation) {
  auto sys = hub_and_spoke(4, kSpec);
  EXPECT_NO_THROW(sys.validate());
  EXPECT_EQ(sys.node_name(4), "hub");
  EXPECT_EQ(sys.node_index("r2"), 1);
  EXPECT_THROW(sys.node_index("r9"), DomainError);
  TetherSystem broken;
  broken.robotCount = 3;
  broken.edges = {{0, 1, kSpec}};
  EXPECT_THROW(broken.validate(), DomainError);
}

TEST(Tether, HubSlackReturnsCentroid) {
  const auto sys = hub_and_spoke(4, kSpec);
  const auto h = solve_hub(sys, square());
  EXPECT_NEAR((h.position - Vec3(0.75, 0, 0.75)).norm(), 0.0, 1e-12);
  EXPECT_EQ(h.residual, 0.0);
}

TEST(Tether, HubMatchesBruteForce) {
  const auto sys = hub_and_spoke(4, kSpec);
  const rng::Stream s(17, "hub.brute");
  for (std::uint64_t t = 0; t < 6; ++t) {
    std::vector<Vec3> robots;
    for (std::uint64_t r = 0; r < 4; ++r)
      robots.emplace_back(s.uniform(-2.5, 2.5, t, r, 0), s.uniform(-0.3, 0.3, t, r, 1),
                          s.uniform(-2.5, 2.5, t, r, 2));
    const auto h = solve_hub(sys, robots);
    const Vec3 centroid = (robots[0] + robots[1] + robots[2] + robots[3]) / 4.0;
    auto nodes = robots;
    nodes.push_back(h.position);
    const double stretched = spring_energy(sys, nodes);
    if (stretched == 0.0) continue;  // slack set: any feasible point is optimal
    const Vec3 bf = brute_force_hub(sys, robots, centroid, 3.0);
    EXPECT_LT((h.position - bf).norm(), 1e-4) << "trial " << t;
    EXPECT_LT(h.residual, 1e-6);
  }
}

TEST(Tether, HubVelocityMatchesFiniteDifference) {
  const auto sys = hub_and_spoke(4, kSpec);
  std::vector<Vec3> robots{{2.2, 0, 1.9}, {1.6, 0.1, -0.4}, {-0.6, 0, 1.7}, {-0.3, -0.1, -0.7}};
  const std::vector<Vec3> v{{0.1, 0, 0.3}, {0, 0.02, 0}, {-0.2, 0, 0.1}, {0, 0, -0.4}};
  const auto h0 = solve_hub(sys, robots);
  const Vec3 hv = hub_velocity(sys, robots, h0.position, v);
  const double eps = 1e-6;
  auto moved = robots;
  for (int i = 0; i < 4; ++i) moved[i] += eps * v[i];
  const auto h1 = solve_hub(sys, moved, h0.position);
  EXPECT_LT((hv - (h1.position - h0.position) / eps).norm(), 1e-4);
}

TEST(Tether, HangingRobotStretch) {
  // One robot on a single tether below a fixed anchor: stretch = m g / k.
  TetherSystem sys;
  sys.robotCount = 2;
  sys.edges = {{0, 1, kSpec}};
  const double m = 3.0, g = 3.71;
  std::vector<Vec3> pos{{0, 0, 0}, {0.3, 0, -1.0}};
  std::vector<FreeMask> free{{false, false, false}, {true, true, true}};
  std::vector<Vec3> loads{Vec3::Zero(), Vec3(0, 0, -m * g)};
  const auto eq = static_equilibrium(sys, pos, free, loads);
  EXPECT_NEAR(eq.positions[1].z(), -(1.8 + m * g / 200.0), 1e-6);
  EXPECT_NEAR(eq.positions[1].x(), 0.0, 1e-6);
  EXPECT_LT(eq.residual, 1e-6);
}

TEST(Tether, SlipEnergyFloorPendulum) {
  // Released from rest level with the anchor and slack: energy balance
  // m g d = k/2 (d - L)^2 for the drop d.
  TetherSystem sys;
  sys.robotCount = 2;
  sys.edges = {{0, 1, kSpec}};
  const double m = 3.0, g = 3.71, k = 200.0, L = 1.8;
  const double a = m * g / k;
  const double drop = L + a + std::sqrt(a * a + 2 * L * a);
  std::vector<Vec3> pos{{0, 0, 0}, {1.0, 0, 0}};
  const double floorZ = slip_energy_floor(sys, pos, 1, m, Vec3::Zero(), dynamics::Body{"t", g});
  EXPECT_NEAR(floorZ, -drop, 1e-4);
}

TEST(Tether, EquilibriumCheck) {
  grip::GripState g = grip::make_grip_state({1.5, 1.5});
  EXPECT_EQ(check_equilibrium(g, Vec3(0, 0, -3.0), Vec3::Zero()), Equilibrium::Holds);
  EXPECT_EQ(check_equilibrium(g, Vec3(0, 0, -3.0), Vec3(0, 0, -1e-9)), Equilibrium::Slips);
  EXPECT_EQ(check_equilibrium(g, Vec3(0, 0, -5.0), Vec3(0, 0, 2.0)), Equilibrium::Holds);
  EXPECT_EQ(check_equilibrium(grip::GripState{}, Vec3(0, 0, -1e-3), Vec3::Zero()), Equilibrium::Slips);
  // Strict form limits the outward pull separately.
  EXPECT_EQ(check_equilibrium_strict(g, Vec3::Zero(), Vec3(0, 2.0, 0), Vec3::UnitY(), 0.5),
            Equilibrium::Slips);
  EXPECT_EQ(check_equilibrium_strict(g, Vec3::Zero(), Vec3(0, 1.0, 0), Vec3::UnitY(), 0.5),
            Equilibrium::Holds);
}

TEST(Tether, NetRobotForce) {
  const auto sys = hub_and_spoke(4, kSpec);
  std::vector<Vec3> robots = square();
  robots[3] = Vec3(0.75, 0, -1.5);
  auto nodes = with_hub(sys, robots);
  const auto loads = net_robot_force(sys, 3, nodes, 3.0, dynamics::mars());
  EXPECT_NEAR(loads.gravity.z(), -3.0 * 3.71, 1e-12);
  const double l = (nodes[4] - robots[3]).norm();
  EXPECT_NEAR(loads.tether.norm(), 200.0 * std::max(0.0, l - 1.8), 1e-9);
}
