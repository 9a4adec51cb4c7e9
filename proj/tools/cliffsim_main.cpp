// cliffsim: scenario runner. Exit codes: 0 ok, 1 runtime error,
// 2 invalid configuration or arguments, 3 simulated system failed.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cliffsim/climber.hpp"
#include "cliffsim/config.hpp"
#include "cliffsim/dynamics.hpp"
#include "cliffsim/grip.hpp"
#include "cliffsim/io.hpp"
#include "cliffsim/perception.hpp"
#include "cliffsim/study.hpp"
#include "cliffsim/terrain.hpp"

namespace fs = std::filesystem;
using namespace cliffsim;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSystemFailure = 3;

struct Common {
  std::string configPath;
  std::string outDir;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<int> threads;
};

struct Run {
  config::ScenarioConfig cfg;
  fs::path out;
  std::string command;

  io::Provenance provenance() const { return io::make_provenance(command, cfg.source, cfg.seed); }
};

Run prepare(const std::string& command, const Common& opt) {
  Run run;
  run.command = command;
  run.cfg = opt.configPath.empty() ? config::parse_config(json::object())
                                   : config::load_config(opt.configPath);
  if (opt.seed) config::set_seed(run.cfg, *opt.seed);
  if (opt.trials) {
    if (*opt.trials < 1) throw config::ConfigError("--trials must be >= 1");
    run.cfg.study.reliability.trials = *opt.trials;
  }
  if (opt.threads) {
    if (*opt.threads < 1) throw config::ConfigError("--threads must be >= 1");
    run.cfg.study.reliability.threads = *opt.threads;
  }
  run.out = opt.outDir.empty() ? fs::path(run.cfg.output.directory) : fs::path(opt.outDir);
  fs::create_directories(run.out);
  return run;
}

json vec_json(const Vec3& v) { return {io::finite_or_null(v.x()), io::finite_or_null(v.y()), io::finite_or_null(v.z())}; }

// ---------------------------------------------------------------------------

int cmd_terrain(const Run& run) {
  const auto& t = run.cfg.terrain;
  const auto patch = terrain::generate_patch(t.params, t.extent, t.spacing);
  const auto asperities = terrain::extract_asperities(patch);
  const auto prov = run.provenance();

  io::CsvWriter hcsv(run.out / "terrain_patch.csv", prov, {"row", "col", "x", "y", "z"});
  for (std::size_t i = 0; i < patch.rows; ++i)
    for (std::size_t j = 0; j < patch.cols; ++j) {
      hcsv << static_cast<long long>(i) << static_cast<long long>(j) << patch.x(j) << patch.y(i)
           << patch.at(i, j);
      hcsv.end_row();
    }
  hcsv.close();

  const grip::SpineSpec spine = run.cfg.grip.spine;
  io::CsvWriter acsv(run.out / "asperities.csv", prov,
                     {"x", "y", "z", "tip_radius", "normal_angle_deg", "engageable"});
  int engageable = 0;
  for (const auto& a : asperities) {
    const bool ok = grip::can_engage(spine, a);
    engageable += ok;
    acsv << a.position.x() << a.position.y() << a.position.z() << a.tipRadius
         << rad2deg(a.normalAngle) << (ok ? 1 : 0);
    acsv.end_row();
  }
  acsv.close();

  io::write_json(run.out / "terrain.json", prov,
                 {{"rows", patch.rows},
                  {"cols", patch.cols},
                  {"spacing", patch.spacing},
                  {"rms_height", patch.rms()},
                  {"asperities", asperities.size()},
                  {"engageable_by_nominal_spine", engageable},
                  {"theta_min_deg", rad2deg(grip::theta_min(spine))}});
  std::printf("terrain: %zux%zu patch, rms %.3g m, %zu asperities -> %s\n", patch.rows, patch.cols,
              patch.rms(), asperities.size(), run.out.string().c_str());
  return 0;
}

// Candidate grip points as matched stereo pixels: ul,vl,ur,vr per row.
std::vector<Vec3> triangulate_candidates(const perception::StereoPair& pair, const fs::path& csv,
                                         int& lowConfidence) {
  std::ifstream in(csv);
  if (!in) throw config::ConfigError("cannot read candidates " + csv.string());
  std::vector<Vec3> points;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find_first_of("0123456789") != 0 && line[0] != '-') continue;
    }
    std::stringstream ss(line);
    double v[4];
    char comma;
    if (!(ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3]))
      throw config::ConfigError("candidates: expected ul,vl,ur,vr in " + csv.string());
    const auto est = perception::obstacle_distance(pair, {v[0], v[1]}, {v[2], v[3]});
    if (est.lowConfidence) {
      ++lowConfidence;
      continue;
    }
    points.push_back(est.point);
  }
  return points;
}

int cmd_hop(const Run& run, const std::string& candidates) {
  const auto& cfg = run.cfg;
  const auto params = config::flight_params(cfg);
  const auto prov = run.provenance();
  dynamics::RobotState start;
  start.propellant = params.propellantBudget;

  Vec3 displacement = cfg.hop.displacement;
  json selection = nullptr;
  if (!candidates.empty()) {
    if (!cfg.cameras) throw config::ConfigError("--candidates needs a cameras section");
    int low = 0;
    const auto points = triangulate_candidates(cfg.cameras->pair, candidates, low);
    const double range = cfg.hop.displacement.norm();
    const auto target = perception::select_hop_target(Vec3::Zero(), points, range);
    selection = {{"candidates", points.size()}, {"low_confidence", low}, {"hop_range", range}};
    if (!target) {
      selection["target"] = nullptr;
      io::write_json(run.out / "hop_summary.json", prov, {{"selection", selection}});
      std::fprintf(stderr, "hop: no candidate within range\n");
      return kExitSystemFailure;
    }
    displacement = *target;
    if (cfg.hop.surface == dynamics::Surface::Vertical) displacement.y() = 0.0;
    selection["target"] = vec_json(*target);
  }

  dynamics::FlightOptions fo;
  fo.dt = cfg.hop.dt;
  const auto hop = dynamics::execute_hop(start, params, cfg.body, displacement, cfg.hop.surface, fo);

  io::CsvWriter tcsv(run.out / "hop_trajectory.csv", prov,
                     {"t", "x", "y", "z", "vx", "vy", "vz", "roll_deg", "pitch_deg", "yaw_deg",
                      "propellant_kg"});
  for (const auto& s : hop.trajectory) {
    const Vec3 e = dynamics::euler_zyx(s.state.attitude);
    tcsv << s.t << s.state.position.x() << s.state.position.y() << s.state.position.z()
         << s.state.velocity.x() << s.state.velocity.y() << s.state.velocity.z()
         << rad2deg(e.x()) << rad2deg(e.y()) << rad2deg(e.z()) << s.state.propellant;
    tcsv.end_row();
  }
  tcsv.close();

  io::CsvWriter bcsv(run.out / "hop_bodies.csv", prov,
                     {"body", "gravity", "reach_at_hop_time", "apex_reach", "apex_time"});
  json sweep = json::array();
  for (const auto& name : cfg.hop.sweepBodies) {
    const auto body = *dynamics::body_by_name(name);
    const auto r = dynamics::vertical_reach(params, body, cfg.robot.calibration.propellant,
                                            cfg.robot.calibration.duration, cfg.hop.dt);
    bcsv << body.name << body.gravity << r.atHopTime << r.apex << r.apexTime;
    bcsv.end_row();
    sweep.push_back({{"body", body.name}, {"reach_at_hop_time", r.atHopTime}, {"apex_reach", r.apex}});
  }
  bcsv.close();

  json summary = {{"body", cfg.body.name},
                  {"surface", cfg.hop.surface == dynamics::Surface::Vertical ? "vertical" : "horizontal"},
                  {"target", vec_json(displacement)},
                  {"displacement", vec_json(hop.displacement)},
                  {"distance", hop.displacement.norm()},
                  {"time", hop.duration},
                  {"propellant_g", hop.propellantUsed * 1e3},
                  {"apex_height", hop.apexHeight},
                  {"thrust", params.thrust},
                  {"contact_speed", params.contactSpeed},
                  {"body_sweep", sweep}};
  if (!selection.is_null()) summary["selection"] = selection;
  io::write_json(run.out / "hop_summary.json", prov, summary);
  std::printf("hop: %.4f m in %.4f s using %.4f g\n", hop.displacement.norm(), hop.duration,
              hop.propellantUsed * 1e3);
  return 0;
}

int cmd_calibrate(const Run& run) {
  auto target = run.cfg.robot.calibration;
  target.body = run.cfg.body;
  const auto cal = dynamics::calibrate_thruster(run.cfg.robot.params, target, run.cfg.hop.dt);
  io::write_json(run.out / "calibration.json", run.provenance(),
                 {{"body", target.body.name},
                  {"thrust", cal.params.thrust},
                  {"specific_impulse", cal.params.specificImpulse},
                  {"burn_time", cal.burnTime},
                  {"contact_speed", cal.params.contactSpeed},
                  {"displacement", cal.achievedDisplacement},
                  {"propellant_g", cal.achievedPropellant * 1e3}});
  std::printf("calibrate: thrust %.6f N, burn %.6f s, %.4f m, %.4f g\n", cal.params.thrust,
              cal.burnTime, cal.achievedDisplacement, cal.achievedPropellant * 1e3);
  return 0;
}

int cmd_climb(const Run& run) {
  const auto& cfg = run.cfg;
  const auto setup = config::climb_setup(cfg, config::flight_params(cfg));
  const auto log = climber::run_climb(setup, cfg.cycles);
  const auto prov = run.provenance();
  const int n = setup.scenario.robotCount;

  std::vector<std::string> cols{"t"};
  for (int r = 1; r <= n; ++r)
    for (const char* c : {"x", "y", "z", "mode"}) cols.push_back("r" + std::to_string(r) + "_" + c);
  for (const char* c : {"hub_x", "hub_y", "hub_z", "center_x", "center_y", "center_z"}) cols.push_back(c);
  io::CsvWriter scsv(run.out / "climb_trace.csv", prov, cols);
  for (const auto& s : log.samples) {
    scsv << s.t;
    for (int r = 0; r < n; ++r)
      scsv << s.robots[r].x() << s.robots[r].y() << s.robots[r].z() << dynamics::to_string(s.modes[r]);
    scsv << s.hub.x() << s.hub.y() << s.hub.z() << s.center.x() << s.center.y() << s.center.z();
    scsv.end_row();
  }
  scsv.close();

  io::CsvWriter ecsv(run.out / "climb_events.csv", prov,
                     {"t", "robot", "cycle", "event", "x", "y", "z", "capacity"});
  for (const auto& e : log.events) {
    ecsv << e.t << e.robot + 1 << e.cycle + 1 << climber::to_string(e.kind) << e.position.x()
         << e.position.y() << e.position.z() << e.capacity;
    ecsv.end_row();
  }
  ecsv.close();

  io::CsvWriter ccsv(run.out / "climb_centers.csv", prov, {"cycle", "x", "y", "z"});
  for (std::size_t i = 0; i < log.cycleCenters.size(); ++i) {
    ccsv << static_cast<long long>(i) << log.cycleCenters[i].x() << log.cycleCenters[i].y()
         << log.cycleCenters[i].z();
    ccsv.end_row();
  }
  ccsv.close();

  json slips = json::array();
  for (const auto& s : log.slips)
    slips.push_back({{"robot", s.robot + 1},
                     {"cycle", s.cycle + 1},
                     {"pre_hop_z", s.preHopZ},
                     {"energy_floor_z", io::finite_or_null(s.energyFloorZ)},
                     {"min_z", s.minZ},
                     {"settled_z", s.settledZ}});
  json finals = json::array();
  for (const auto& p : log.finalPositions) finals.push_back(vec_json(p));
  json prop = json::array();
  for (double p : log.propellantUsed) prop.push_back(p * 1e3);
  io::write_json(run.out / "climb_summary.json", prov,
                 {{"status", climber::to_string(log.status)},
                  {"message", log.message},
                  {"cycles", cfg.cycles},
                  {"hops", log.hops},
                  {"duration", log.duration},
                  {"propellant_g", log.total_propellant() * 1e3},
                  {"propellant_per_robot_g", prop},
                  {"peak_anchor_load", log.peakAnchorLoad},
                  {"static_share", climber::static_share(n, setup.scenario.hopBatch, setup.robot.mass,
                                                         setup.body.gravity)},
                  {"slips", slips},
                  {"final_positions", finals}});
  std::printf("climb: %s after %.3f s, %d hops, %.3f g%s%s\n", climber::to_string(log.status),
              log.duration, log.hops, log.total_propellant() * 1e3, log.message.empty() ? "" : ": ",
              log.message.c_str());
  return log.status == climber::RunStatus::Failed ? kExitSystemFailure : 0;
}

int cmd_study(const Run& run) {
  const auto& cfg = run.cfg;
  const auto prov = run.provenance();
  const auto& rel = cfg.study.reliability;

  study::ReliabilityModel model;
  model.robotMass = cfg.study.trade.robotMass;
  model.gravity = cfg.study.trade.gravity;
  model.band = cfg.grip.band;
  if (rel.capacity == "terrain") {
    const auto patch = terrain::generate_patch(cfg.terrain.params, cfg.terrain.extent, cfg.terrain.spacing);
    const auto array = grip::make_spine_array(64, cfg.grip.tipRadiusMin, cfg.grip.tipRadiusMax,
                                              cfg.grip.spine, cfg.robot.params.diameter);
    model.capacityPool = study::terrain_capacity_pool(array, terrain::extract_asperities(patch),
                                                      cfg.grip.band, cfg.kappa);
    if (model.capacityPool.empty())
      throw std::runtime_error("study: terrain yields no engageable contacts");
  }

  io::CsvWriter fcsv(run.out / "failure_curves.csv", prov,
                     {"robots", "failed", "spines", "failures", "trials", "probability"});
  for (int f : rel.failedCounts)
    for (int n : rel.systemSizes) {
      if (n <= f) continue;
      for (const auto& p : study::failure_curve(model, n, f, rel.kMin, rel.kMax, rel.trials,
                                                cfg.seed, rel.threads)) {
        fcsv << p.robots << p.failed << p.spines << p.failures << p.trials << p.probability();
        fcsv.end_row();
      }
    }
  fcsv.close();

  json reports = json::array();
  io::CsvWriter tcsv(run.out / "fitness.csv", prov,
                     {"hop_batch", "robots", "feasible", "spines", "distance", "time", "coverage",
                      "links", "norm_spines", "norm_time", "norm_coverage", "norm_links", "fitness"});
  for (int batch : cfg.study.hopBatches) {
    auto trade = cfg.study.trade;
    trade.hopBatch = batch;
    const auto rep = study::fitness_study(trade);
    json rows = json::array();
    for (std::size_t i = 0; i < rep.raw.size(); ++i) {
      const auto& m = rep.raw[i];
      const auto& nm = rep.normalised[i];
      tcsv << batch << m.robots << (m.feasible ? 1 : 0) << m.spines << m.distance << m.time
           << m.coverage << m.links << nm.spines << nm.time << nm.coverage << nm.links
           << rep.fitness[i];
      tcsv.end_row();
      int critical = -1;
      if (m.feasible)
        critical = study::critical_spines(m.robots, batch, trade.robotMass, trade.gravity,
                                          trade.perContactLoad);
      rows.push_back({{"robots", m.robots},
                      {"feasible", m.feasible},
                      {"critical_spines", m.feasible ? json(critical) : json(nullptr)},
                      {"raw", {{"spines", io::finite_or_null(m.spines)},
                               {"distance", m.distance},
                               {"time", m.time},
                               {"coverage", m.coverage},
                               {"links", m.links}}},
                      {"normalized", {{"spines", nm.spines},
                                      {"time", nm.time},
                                      {"coverage", nm.coverage},
                                      {"links", nm.links}}},
                      {"fitness", rep.fitness[i]}});
    }
    json sens = json::array();
    for (const auto& s : rep.sensitivity)
      sens.push_back({{"parameter", s.parameter}, {"factor", s.factor}, {"argmax", s.argmax}});
    reports.push_back({{"hop_batch", batch},
                       {"overlap_model", study::to_string(trade.overlap)},
                       {"systems", rows},
                       {"argmax", rep.argmax},
                       {"argmin", rep.argmin},
                       {"argmax_stable", rep.argmaxStable},
                       {"sensitivity", sens}});
    std::printf("study: n=%d argmax N=", batch);
    for (std::size_t i = 0; i < rep.argmax.size(); ++i) std::printf("%s%d", i ? "," : "", rep.argmax[i]);
    std::printf("%s\n", rep.argmaxStable ? "" : " (sensitive to r/sep +-10%)");
  }
  tcsv.close();
  io::write_json(run.out / "study.json", prov,
                 {{"reliability", {{"trials", rel.trials}, {"capacity", rel.capacity}}},
                  {"fitness", reports}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tethered multi-robot cliff-climbing simulator"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common opt;
  std::string candidates;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.configPath, "scenario JSON (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.outDir, "output directory (overrides output.directory)");
    sub->add_option("--seed", opt.seed, "global RNG seed (overrides the config)");
    sub->add_option("--trials", opt.trials, "Monte Carlo trials");
    sub->add_option("--threads", opt.threads, "Monte Carlo worker threads");
  };
  auto* terrainCmd = app.add_subcommand("terrain", "fractal wall patch and asperity census");
  auto* hopCmd = app.add_subcommand("hop", "single hop trajectory and per-body reach sweep");
  auto* climbCmd = app.add_subcommand("climb", "tethered gait run");
  auto* studyCmd = app.add_subcommand("study", "failure-probability curves and fitness trade study");
  auto* calCmd = app.add_subcommand("calibrate", "solve main-engine thrust for the hop datum");
  for (auto* s : {terrainCmd, hopCmd, climbCmd, studyCmd, calCmd}) add_common(s);
  hopCmd->add_option("--candidates", candidates,
                     "CSV of matched stereo pixels (ul,vl,ur,vr); hop to the nearest up-slope point")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*terrainCmd) return cmd_terrain(prepare("terrain", opt));
    if (*hopCmd) return cmd_hop(prepare("hop", opt), candidates);
    if (*climbCmd) return cmd_climb(prepare("climb", opt));
    if (*studyCmd) return cmd_study(prepare("study", opt));
    if (*calCmd) return cmd_calibrate(prepare("calibrate", opt));
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitValidation;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
