#pragma once

// Tethered multi-robot climbing gait: robots hop up the wall in batches,
// re-grip, and are caught by the tether network when a grip fails.
//
// Wall frame: the wall is the plane y = 0 with +y pointing out of the rock,
// z is up the wall and x runs along it. Robot and cycle indices are
// zero-based.

#include <cstdint>
#include <string>
#include <vector>

#include "cliffsim/common.hpp"
#include "cliffsim/dynamics.hpp"
#include "cliffsim/grip.hpp"
#include "cliffsim/terrain.hpp"
#include "cliffsim/tether.hpp"

namespace cliffsim::climber {

struct FailureInjection {
  int robot = 0;
  int cycle = 0;
};

struct ClimbScenario {
  int robotCount = 4;
  int hopBatch = 1;
  double hopDistance = 1.27;  ///< d [m]
  std::vector<Vec3> initialPositions{{1.5, 0.0, 1.5}, {1.5, 0.0, 0.0}, {0.0, 0.0, 1.5}, {0.0, 0.0, 0.0}};
  double approachAngle = deg2rad(55.0);  ///< recorded only
  int spinesPerRobot = 200;              ///< k
  std::uint64_t seed = 1;
  std::vector<int> gaitOrder;  ///< empty: ascending index
  int retryLimit = 5;          ///< re-hops per cycle before PARTIAL
  double settleSpeed = 1e-3;   ///< [m/s]
  double maxSettleTime = 300.0;
  double wallDrag = 3.0;       ///< viscous drag on a sliding robot [N s/m]
  double dt = 1e-3;
  double logInterval = 0.01;
  std::vector<FailureInjection> injections;
};

void validate(const ClimbScenario& scenario);

enum class Engagement {
  Terrain,  ///< each spine's Bernoulli attempt against the landing patch
  All,      ///< exactly spinesPerRobot contacts engage
};

struct GripModel {
  grip::SpineSpec spine;
  double tipRadiusMin = 12e-6;
  double tipRadiusMax = 25e-6;
  grip::CapacityBand band;
  Engagement engagement = Engagement::Terrain;
  double patchExtent = 2e-3;    ///< terrain sampled around each landing [m]
  double patchSpacing = 20e-6;  ///< [m]
};

struct ClimbSetup {
  ClimbScenario scenario;
  terrain::TerrainParams terrain;
  GripModel grip;
  tether::TetherSystem tethers;
  dynamics::RobotParams robot;  ///< calibrated
  dynamics::Body body = dynamics::mars();
};

enum class EventKind { HopStart, GripOk, GripFail, Slip, Recovered };
const char* to_string(EventKind kind);

struct Event {
  double t = 0.0;
  int robot = 0;
  int cycle = 0;
  EventKind kind = EventKind::HopStart;
  Vec3 position = Vec3::Zero();
  double capacity = 0.0;  ///< grip capacity for GRIP_* events [N]
};

struct Sample {
  double t = 0.0;
  std::vector<Vec3> robots;
  Vec3 hub = Vec3::Zero();
  std::vector<dynamics::Mode> modes;
  Vec3 center = Vec3::Zero();  ///< mean robot position
};

struct SlipRecord {
  int robot = 0;
  int cycle = 0;
  double preHopZ = 0.0;
  /// Lowest z reachable with the energy at grip failure (NaN when several
  /// robots slip together).
  double energyFloorZ = 0.0;
  double minZ = 0.0;      ///< lowest z observed while sliding
  double settledZ = 0.0;  ///< hanging equilibrium
};

enum class RunStatus { Completed, Recovered, Partial, Failed };
const char* to_string(RunStatus status);

struct ClimbLog {
  RunStatus status = RunStatus::Completed;
  std::string message;
  std::vector<Event> events;
  std::vector<Sample> samples;
  std::vector<Vec3> cycleCenters;  ///< start plus one per completed cycle
  std::vector<double> propellantUsed;  ///< per robot [kg]
  int hops = 0;
  std::vector<SlipRecord> slips;
  double peakAnchorLoad = 0.0;  ///< largest |F_g + F_s| on a gripping robot [N]
  std::vector<Vec3> finalPositions;
  double duration = 0.0;

  double total_propellant() const;
};

/// Static share each anchored robot must carry: N m g / (N - n).
double static_share(int robots, int batch, double mass, double gravity);

ClimbLog run_climb(const ClimbSetup& setup, int cycles);

/// Re-run with a forced grip failure on the first landing of `robot` in
/// `cycle`; later re-hops sample grips normally.
ClimbLog inject_failure(ClimbSetup setup, int robot, int cycle, int cycles);

}  // namespace cliffsim::climber
