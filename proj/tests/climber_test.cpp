#include <gtest/gtest.h>

#include <cmath>

#include "cliffsim/climber.hpp"

using namespace cliffsim;
using namespace cliffsim::climber;

namespace {

ClimbSetup nominal() {
  ClimbSetup s;
  s.robot = dynamics::calibrate_thruster(s.robot, {}).params;
  s.tethers = tether::hub_and_spoke(4, tether::TetherSpec{200.0, 1.8, 15.0});
  return s;
}

int count(const ClimbLog& log, EventKind kind) {
  int n = 0;
  for (const auto& e : log.events) n += e.kind == kind;
  return n;
}

}  // namespace

TEST(Climber, StaticShare) {
  EXPECT_NEAR(static_share(4, 1, 3.0, 3.71), 4 * 3.0 * 3.71 / 3.0, 1e-12);
  EXPECT_THROW(static_share(2, 2, 3.0, 3.71), DomainError);
}

TEST(Climber, ScenarioValidation) {
  ClimbSetup s = nominal();
  s.scenario.hopBatch = 4;
  EXPECT_THROW(run_climb(s, 1), DomainError);
  s = nominal();
  s.scenario.initialPositions.pop_back();
  EXPECT_THROW(run_climb(s, 1), DomainError);
  s = nominal();
  s.scenario.gaitOrder = {0, 1, 1, 3};
  EXPECT_THROW(run_climb(s, 1), DomainError);
  EXPECT_THROW(run_climb(nominal(), 0), DomainError);
}

TEST(Climber, NominalCycleAdvancesEveryRobot) {
  const ClimbSetup s = nominal();
  const auto log = run_climb(s, 2);
  ASSERT_EQ(log.status, RunStatus::Completed) << log.message;
  EXPECT_EQ(log.hops, 8);
  EXPECT_EQ(count(log, EventKind::HopStart), 8);
  EXPECT_EQ(count(log, EventKind::GripOk), 8);
  EXPECT_EQ(count(log, EventKind::GripFail), 0);
  for (int r = 0; r < 4; ++r) {
    const Vec3 expected = s.scenario.initialPositions[r] + Vec3(0, 0, 2 * 1.27);
    EXPECT_LT((log.finalPositions[r] - expected).norm(), 1e-3) << "robot " << r + 1;
  }
  EXPECT_NEAR(log.duration / 2.0, 6.0, 0.6);
  EXPECT_NEAR(log.total_propellant(), 0.005 * log.hops, 0.02 * 0.005 * log.hops);
  ASSERT_EQ(log.cycleCenters.size(), 3u);
  EXPECT_NEAR(log.cycleCenters[1].z() - log.cycleCenters[0].z(), 1.27, 1e-3);
  EXPECT_NEAR(log.cycleCenters[2].z() - log.cycleCenters[1].z(), 1.27, 1e-3);
  // Anchored robots never leave the wall plane.
  for (const auto& smp : log.samples) {
    for (int r = 0; r < 4; ++r) {
      if (smp.modes[r] == dynamics::Mode::Anchored) {
        EXPECT_NEAR(smp.robots[r].y(), 0.0, 1e-9);
      }
    }
  }
}

TEST(Climber, Deterministic) {
  const auto a = run_climb(nominal(), 1), b = run_climb(nominal(), 1);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].t, b.events[i].t);
    EXPECT_EQ(a.events[i].capacity, b.events[i].capacity);
  }
  EXPECT_EQ(a.samples.size(), b.samples.size());
}

TEST(Climber, GaitOrderIsRespected) {
  ClimbSetup s = nominal();
  s.scenario.gaitOrder = {3, 2, 1, 0};
  const auto log = run_climb(s, 1);
  ASSERT_EQ(log.status, RunStatus::Completed) << log.message;
  std::vector<int> starts;
  for (const auto& e : log.events)
    if (e.kind == EventKind::HopStart) starts.push_back(e.robot);
  EXPECT_EQ(starts, (std::vector<int>{3, 2, 1, 0}));
}

TEST(Climber, InjectedFailureRecovers) {
  const ClimbSetup s = nominal();
  const auto log = inject_failure(s, 3, 0, 1);
  ASSERT_EQ(log.status, RunStatus::Recovered) << log.message;
  EXPECT_EQ(count(log, EventKind::GripFail), 1);
  EXPECT_EQ(count(log, EventKind::Slip), 1);
  EXPECT_GE(count(log, EventKind::Recovered), 1);
  ASSERT_EQ(log.slips.size(), 1u);
  const auto& slip = log.slips[0];
  EXPECT_EQ(slip.robot, 3);
  // The fall stays above the energy bound and ends hanging below the start.
  EXPECT_GE(slip.minZ, slip.energyFloorZ - 1e-6);
  EXPECT_LT(slip.minZ, slip.preHopZ);
  EXPECT_GE(slip.settledZ, slip.minZ - 1e-9);
  // Every robot ends one hop above where it started.
  for (int r = 0; r < 4; ++r) {
    const Vec3 expected = s.scenario.initialPositions[r] + Vec3(0, 0, 1.27);
    EXPECT_LT((log.finalPositions[r] - expected).norm(), 1e-3) << "robot " << r + 1;
  }
  // The re-hop costs extra propellant.
  EXPECT_GT(log.total_propellant(), 0.005 * 4);
  EXPECT_GT(log.hops, 4);
}

TEST(Climber, OverloadedAnchorsFail) {
  ClimbSetup s = nominal();
  s.scenario.hopBatch = 2;
  s.scenario.spinesPerRobot = 12;
  s.grip.engagement = Engagement::All;
  s.grip.band.fixed = 1.5;
  const auto log = run_climb(s, 1);
  EXPECT_EQ(log.status, RunStatus::Failed);
  EXPECT_NE(log.message.find("exceeds grip"), std::string::npos) << log.message;
}

TEST(Climber, RetryLimitGivesPartial) {
  ClimbSetup s = nominal();
  s.scenario.retryLimit = 0;
  s.scenario.injections = {{1, 0}};
  const auto log = run_climb(s, 1);
  EXPECT_EQ(log.status, RunStatus::Partial) << log.message;
}
