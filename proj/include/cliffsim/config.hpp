#pragma once

// Scenario configuration: strict JSON (unknown keys are errors), every
// section optional and defaulted. Robot and cycle indices are 1-based in
// the file and 0-based in memory. Schema: docs/scenario.schema.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cliffsim/climber.hpp"
#include "cliffsim/dynamics.hpp"
#include "cliffsim/perception.hpp"
#include "cliffsim/study.hpp"
#include "cliffsim/terrain.hpp"
#include "cliffsim/tether.hpp"

namespace cliffsim::config {

/// Bad or unreadable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TerrainSection {
  terrain::TerrainParams params;
  double extent = 2e-3;     ///< patch side [m]
  double spacing = 20e-6;   ///< lattice step [m]
};

struct RobotSection {
  dynamics::RobotParams params;
  bool thrustGiven = false;  ///< otherwise calibrated from `calibration`
  dynamics::CalibrationTarget calibration;
};

struct HopSection {
  dynamics::Surface surface = dynamics::Surface::Vertical;
  Vec3 displacement{0.0, 0.0, 1.27};
  std::vector<std::string> sweepBodies{"mars", "moon", "ceres", "phobos"};
  double dt = 1e-3;
};

struct TetherSection {
  tether::TetherSpec spec{200.0, 1.8, 15.0};
  /// "hub_and_spoke" or explicit edges between "r1".."rN" / "hub".
  std::string topology = "hub_and_spoke";
  std::vector<std::pair<std::string, std::string>> edges;
};

struct ReliabilitySection {
  std::vector<int> systemSizes{2, 3, 4, 5, 6, 7, 8};
  std::vector<int> failedCounts{1, 2};
  int kMin = 1;
  int kMax = 40;
  long long trials = 100000;
  int threads = 1;
  std::string capacity = "band";  ///< "band" or "terrain"
};

struct StudySection {
  study::TradeStudyConfig trade;
  std::vector<int> hopBatches{1, 2};
  ReliabilitySection reliability;
};

struct CameraSection {
  perception::StereoPair pair;
};

struct OutputSection {
  std::string directory = "out";
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  dynamics::Body body = dynamics::mars();
  TerrainSection terrain;
  RobotSection robot;
  HopSection hop;
  climber::GripModel grip;
  std::optional<double> kappa;
  TetherSection tethers;
  climber::ClimbScenario climb;
  int cycles = 1;
  StudySection study;
  std::optional<CameraSection> cameras;
  OutputSection output;
  nlohmann::json source = nlohmann::json::object();  ///< as parsed, for hashing
};

/// Parse and validate; throws ConfigError naming the offending key path.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Apply a new global seed everywhere it is used.
void set_seed(ScenarioConfig& config, std::uint64_t seed);

tether::TetherSystem build_tethers(const ScenarioConfig& config);

/// Robot parameters with thrust and contact speed set, calibrating if the
/// config does not fix the thrust.
dynamics::RobotParams flight_params(const ScenarioConfig& config);

climber::ClimbSetup climb_setup(const ScenarioConfig& config,
                                const dynamics::RobotParams& calibrated);

}  // namespace cliffsim::config
