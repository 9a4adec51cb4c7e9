#include "cliffsim/config.hpp"

#include <fstream>
#include <set>

namespace cliffsim::config {

using nlohmann::json;

namespace {

// Pulls typed fields out of one JSON object and rejects leftovers.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (auto* v = find(key)) out = number(*v, at(key));
  }
  void get(const std::string& key, int& out) {
    if (auto* v = find(key)) out = static_cast<int>(integer(*v, at(key)));
  }
  void get(const std::string& key, long long& out) {
    if (auto* v = find(key)) out = integer(*v, at(key));
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(at(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, Vec3& out) {
    if (auto* v = find(key)) out = vec3(*v, at(key));
  }
  void get(const std::string& key, std::vector<int>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(static_cast<int>(integer((*v)[i], at(key) + "[" + std::to_string(i) + "]")));
    }
  }
  void get_degrees(const std::string& key, double& radians) {
    if (auto* v = find(key)) radians = deg2rad(number(*v, at(key)));
  }

  std::optional<Section> sub(const std::string& key) {
    if (auto* v = find(key)) return Section(*v, at(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  static double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
  }
  static long long integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<long long>();
  }
  static Vec3 vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where, "expected [x, y, z]");
    return {number(v[0], where), number(v[1], where), number(v[2], where)};
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_terrain(Section s, TerrainSection& t) {
  s.get("fractal_dim", t.params.fractalDim);
  s.get("roughness_amp", t.params.roughnessAmp);
  s.get("sample_length", t.params.sampleLength);
  s.get("gamma", t.params.gammaFreq);
  s.get("ridges", t.params.ridgeCount);
  s.get("max_freq_index", t.params.maxFreqIndex);
  s.get("extent", t.extent);
  s.get("spacing", t.spacing);
  s.finish();
}

void parse_robot(Section s, RobotSection& r) {
  auto& p = r.params;
  s.get("mass", p.mass);
  s.get("diameter", p.diameter);
  s.get("specific_impulse", p.specificImpulse);
  if (s.find("thrust")) {
    s.get("thrust", p.thrust);
    r.thrustGiven = true;
    if (!(p.thrust > 0.0)) Section::fail(s.at("thrust"), "must be positive (omit it to calibrate)");
  }
  s.get("contact_speed", p.contactSpeed);
  s.get("kp", p.gains.kp);
  s.get("kd", p.gains.kd);
  s.get("rate_gain", p.rateGain);
  s.get("torque_limit", p.torqueLimit);
  s.get("propellant_budget", p.propellantBudget);
  s.get_degrees("clearance_tilt_deg", p.clearanceTilt);
  s.get_degrees("launch_tilt_deg", p.launchTilt);
  if (auto c = s.sub("calibration")) {
    c->get("displacement", r.calibration.displacement);
    c->get("duration", r.calibration.duration);
    c->get("propellant", r.calibration.propellant);
    c->finish();
  }
  s.finish();
}

void parse_hop(Section s, HopSection& h) {
  std::string surface = h.surface == dynamics::Surface::Vertical ? "vertical" : "horizontal";
  s.get("surface", surface);
  if (surface == "vertical") h.surface = dynamics::Surface::Vertical;
  else if (surface == "horizontal") h.surface = dynamics::Surface::Horizontal;
  else Section::fail(s.at("surface"), "expected \"vertical\" or \"horizontal\"");
  s.get("displacement", h.displacement);
  s.get("dt", h.dt);
  if (auto* v = s.find("sweep_bodies")) {
    if (!v->is_array()) Section::fail(s.at("sweep_bodies"), "expected an array of body names");
    h.sweepBodies.clear();
    for (const auto& b : *v) {
      if (!b.is_string() || !dynamics::body_by_name(b.get<std::string>()))
        Section::fail(s.at("sweep_bodies"), "unknown body " + b.dump());
      h.sweepBodies.push_back(b.get<std::string>());
    }
  }
  s.finish();
}

void parse_grip(Section s, climber::GripModel& g, std::optional<double>& kappa) {
  s.get("tip_radius_min", g.tipRadiusMin);
  s.get("tip_radius_max", g.tipRadiusMax);
  s.get("shaft_diameter", g.spine.shaftDiameter);
  s.get_degrees("load_angle_deg", g.spine.loadAngle);
  s.get("friction", g.spine.frictionCoeff);
  s.get("tensile_strength", g.spine.tensileStrength);
  s.get("elastic_modulus", g.spine.elasticModulus);
  s.get("capacity_min", g.band.min);
  s.get("capacity_max", g.band.max);
  if (s.find("capacity_fixed")) {
    double v = 0.0;
    s.get("capacity_fixed", v);
    g.band.fixed = v;
  }
  if (s.find("kappa")) {
    double v = 0.0;
    s.get("kappa", v);
    kappa = v;
  }
  std::string mode = g.engagement == climber::Engagement::Terrain ? "terrain" : "all";
  s.get("engagement", mode);
  if (mode == "terrain") g.engagement = climber::Engagement::Terrain;
  else if (mode == "all") g.engagement = climber::Engagement::All;
  else Section::fail(s.at("engagement"), "expected \"terrain\" or \"all\"");
  s.get("patch_extent", g.patchExtent);
  s.get("patch_spacing", g.patchSpacing);
  s.finish();
}

void parse_tethers(Section s, TetherSection& t) {
  s.get("stiffness", t.spec.stiffness);
  s.get("rest_length", t.spec.restLength);
  s.get("damping", t.spec.damping);
  s.get("topology", t.topology);
  if (t.topology != "hub_and_spoke" && t.topology != "edges")
    Section::fail(s.at("topology"), "expected \"hub_and_spoke\" or \"edges\"");
  if (auto* v = s.find("edges")) {
    if (!v->is_array()) Section::fail(s.at("edges"), "expected [[\"r1\", \"hub\"], ...]");
    for (const auto& e : *v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        Section::fail(s.at("edges"), "each edge is a pair of node names");
      t.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  if (t.topology == "edges" && t.edges.empty())
    Section::fail(s.at("edges"), "required when topology is \"edges\"");
  if (t.topology == "hub_and_spoke" && !t.edges.empty())
    Section::fail(s.at("edges"), "only valid with topology \"edges\"");
  s.finish();
}

void parse_climb(Section s, climber::ClimbScenario& c, int& cycles) {
  s.get("robots", c.robotCount);
  s.get("hop_batch", c.hopBatch);
  s.get("hop_distance", c.hopDistance);
  if (auto* v = s.find("initial_positions")) {
    if (!v->is_array()) Section::fail(s.at("initial_positions"), "expected an array of [x, y, z]");
    c.initialPositions.clear();
    for (const auto& p : *v) c.initialPositions.push_back(Section::vec3(p, s.at("initial_positions")));
  }
  s.get_degrees("approach_angle_deg", c.approachAngle);
  s.get("spines_per_robot", c.spinesPerRobot);
  s.get("gait_order", c.gaitOrder);
  for (int& r : c.gaitOrder) --r;
  s.get("retry_limit", c.retryLimit);
  s.get("settle_speed", c.settleSpeed);
  s.get("max_settle_time", c.maxSettleTime);
  s.get("wall_drag", c.wallDrag);
  s.get("dt", c.dt);
  s.get("log_interval", c.logInterval);
  s.get("cycles", cycles);
  if (auto* v = s.find("inject_failures")) {
    if (!v->is_array()) Section::fail(s.at("inject_failures"), "expected [{robot, cycle}, ...]");
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section f((*v)[i], s.at("inject_failures") + "[" + std::to_string(i) + "]");
      climber::FailureInjection inj{0, 0};
      f.get("robot", inj.robot);
      f.get("cycle", inj.cycle);
      f.finish();
      if (inj.robot < 1 || inj.cycle < 1)
        Section::fail(s.at("inject_failures"), "robot and cycle are 1-based");
      c.injections.push_back({inj.robot - 1, inj.cycle - 1});
    }
  }
  s.finish();
}

void parse_study(Section s, StudySection& st) {
  auto& t = st.trade;
  s.get("robot_mass", t.robotMass);
  s.get("gravity", t.gravity);
  s.get("per_contact_load", t.perContactLoad);
  s.get("hop_distance", t.hopDistance);
  s.get("hop_time", t.hopTime);
  s.get("propellant_budget_g", t.propellantBudget);
  s.get("propellant_per_hop_g", t.propellantPerHop);
  s.get("instrument_range", t.instrumentRange);
  s.get("robot_separation", t.robotSeparation);
  std::string overlap = study::to_string(t.overlap);
  s.get("overlap_model", overlap);
  if (auto m = study::overlap_model_by_name(overlap)) t.overlap = *m;
  else Section::fail(s.at("overlap_model"), "expected all_pairs, tether_edges or chain");
  if (s.find("overlap_count")) {
    int m = 0;
    s.get("overlap_count", m);
    t.overlapCount = m;
  }
  s.get("system_sizes", t.systemSizes);
  s.get("hop_batches", st.hopBatches);
  if (st.hopBatches.empty()) Section::fail(s.at("hop_batches"), "must not be empty");
  if (auto r = s.sub("reliability")) {
    auto& rel = st.reliability;
    r->get("system_sizes", rel.systemSizes);
    r->get("failed", rel.failedCounts);
    r->get("k_min", rel.kMin);
    r->get("k_max", rel.kMax);
    r->get("trials", rel.trials);
    r->get("threads", rel.threads);
    r->get("capacity", rel.capacity);
    r->finish();
  }
  s.finish();
}

perception::CameraModel parse_camera(Section s) {
  double fx = 800, fy = 800, cx = 320, cy = 240, skew = 0;
  if (auto* v = s.find("intrinsics")) {
    if (!v->is_array() || (v->size() != 4 && v->size() != 5))
      Section::fail(s.at("intrinsics"), "expected [fx, fy, cx, cy(, skew)]");
    fx = Section::number((*v)[0], s.at("intrinsics"));
    fy = Section::number((*v)[1], s.at("intrinsics"));
    cx = Section::number((*v)[2], s.at("intrinsics"));
    cy = Section::number((*v)[3], s.at("intrinsics"));
    if (v->size() == 5) skew = Section::number((*v)[4], s.at("intrinsics"));
  }
  Vec3 center = Vec3::Zero(), forward(0, -1, 0), down(0, 0, -1);
  s.get("center", center);
  s.get("forward", forward);
  s.get("down", down);
  s.finish();
  if (!(forward.norm() > 0.0) || !(forward.cross(down).norm() > 1e-9 * forward.norm() * down.norm()))
    Section::fail(s.at("forward"), "forward and down must be non-zero and not parallel");
  return perception::look_at(perception::intrinsics(fx, fy, cx, cy, skew), center, forward, down);
}

void parse_output(Section s, OutputSection& o) {
  s.get("directory", o.directory);
  s.finish();
}

template <typename F>
void checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void validate_all(const ScenarioConfig& c) {
  checked("body", [&] { dynamics::validate(c.body); });
  checked("terrain", [&] {
    terrain::validate(c.terrain.params);
    if (!(c.terrain.extent > 0.0 && c.terrain.spacing > 0.0 && c.terrain.spacing <= c.terrain.extent))
      throw DomainError("extent and spacing must satisfy 0 < spacing <= extent");
  });
  checked("robot", [&] {
    auto p = c.robot.params;
    if (!c.robot.thrustGiven) p.thrust = 1.0;  // placeholder until calibrated
    dynamics::validate(p);
    const auto& t = c.robot.calibration;
    if (!(t.displacement > 0.0 && t.duration > 0.0 && t.propellant > 0.0))
      throw DomainError("calibration targets must be positive");
  });
  checked("hop", [&] {
    if (!c.hop.displacement.allFinite()) throw DomainError("displacement must be finite");
    if (!(c.hop.dt > 0.0)) throw DomainError("dt must be positive");
  });
  checked("grip", [&] {
    grip::validate(c.grip.spine);
    if (!(c.grip.tipRadiusMin > 0.0 && c.grip.tipRadiusMax >= c.grip.tipRadiusMin))
      throw DomainError("tip radii must satisfy 0 < min <= max");
    if (!(c.grip.band.min > 0.0 && c.grip.band.max >= c.grip.band.min))
      throw DomainError("capacity band must satisfy 0 < min <= max");
    if (c.grip.band.fixed && !(*c.grip.band.fixed > 0.0))
      throw DomainError("capacity_fixed must be positive");
    if (c.kappa && !(*c.kappa > 0.0)) throw DomainError("kappa must be positive");
    if (!(c.grip.patchExtent > 0.0 && c.grip.patchSpacing > 0.0 && c.grip.patchSpacing < c.grip.patchExtent))
      throw DomainError("patch extent and spacing must satisfy 0 < spacing < extent");
  });
  checked("tethers", [&] {
    tether::validate(c.tethers.spec);
    build_tethers(c).validate();
  });
  checked("climb", [&] {
    climber::validate(c.climb);
    if (c.cycles < 1) throw DomainError("cycles must be >= 1");
    for (const auto& inj : c.climb.injections)
      if (inj.robot >= c.climb.robotCount || inj.cycle >= c.cycles)
        throw DomainError("failure injection outside the robot or cycle range");
  });
  checked("study", [&] {
    for (int n : c.study.hopBatches) {
      auto t = c.study.trade;
      t.hopBatch = n;
      study::validate(t);
    }
    const auto& r = c.study.reliability;
    if (r.trials < 1) throw DomainError("reliability.trials must be >= 1");
    if (r.threads < 1) throw DomainError("reliability.threads must be >= 1");
    if (!(r.kMin >= 0 && r.kMax >= r.kMin)) throw DomainError("need 0 <= k_min <= k_max");
    if (r.capacity != "band" && r.capacity != "terrain")
      throw DomainError("reliability.capacity must be \"band\" or \"terrain\"");
    if (r.systemSizes.empty() || r.failedCounts.empty())
      throw DomainError("reliability sizes and failure counts must not be empty");
    for (int f : r.failedCounts)
      if (f < 0) throw DomainError("reliability.failed must be non-negative");
    for (int n : r.systemSizes)
      if (n < 1) throw DomainError("reliability.system_sizes must be positive");
  });
  checked("output", [&] {
    if (c.output.directory.empty()) throw DomainError("directory must not be empty");
  });
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig c;
  c.source = doc;
  Section root(doc, "");
  root.get("seed", c.seed);
  if (auto* v = root.find("body")) {
    if (!v->is_string()) Section::fail("body", "expected a body name");
    auto b = dynamics::body_by_name(v->get<std::string>());
    if (!b) Section::fail("body", "unknown body " + v->dump());
    c.body = *b;
  }
  if (auto s = root.sub("terrain")) parse_terrain(*s, c.terrain);
  if (auto s = root.sub("robot")) parse_robot(*s, c.robot);
  if (auto s = root.sub("hop")) parse_hop(*s, c.hop);
  if (auto s = root.sub("grip")) parse_grip(*s, c.grip, c.kappa);
  if (auto s = root.sub("tethers")) parse_tethers(*s, c.tethers);
  if (auto s = root.sub("climb")) parse_climb(*s, c.climb, c.cycles);
  if (auto s = root.sub("study")) parse_study(*s, c.study);
  if (auto s = root.sub("cameras")) {
    c.cameras = CameraSection{};
    if (auto l = s->sub("left")) c.cameras->pair.left = parse_camera(*l);
    else Section::fail("cameras.left", "required");
    if (auto r = s->sub("right")) c.cameras->pair.right = parse_camera(*r);
    else Section::fail("cameras.right", "required");
    s->finish();
  }
  if (auto s = root.sub("output")) parse_output(*s, c.output);
  root.finish();
  set_seed(c, c.seed);
  validate_all(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void set_seed(ScenarioConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.terrain.params.phaseSeed = seed;
  c.climb.seed = seed;
}

tether::TetherSystem build_tethers(const ScenarioConfig& c) {
  if (c.tethers.topology == "hub_and_spoke")
    return tether::hub_and_spoke(c.climb.robotCount, c.tethers.spec);
  tether::TetherSystem sys;
  sys.robotCount = c.climb.robotCount;
  for (const auto& [a, b] : c.tethers.edges)
    if (a == "hub" || b == "hub") sys.hasHub = true;
  for (const auto& [a, b] : c.tethers.edges) {
    const int ia = sys.node_index(a), ib = sys.node_index(b);
    if (ia < 0 || ib < 0) throw DomainError("unknown tether node " + (ia < 0 ? a : b));
    sys.edges.push_back({ia, ib, c.tethers.spec});
  }
  return sys;
}

dynamics::RobotParams flight_params(const ScenarioConfig& c) {
  if (c.robot.thrustGiven) return c.robot.params;
  auto target = c.robot.calibration;
  target.body = c.body;
  return dynamics::calibrate_thruster(c.robot.params, target, c.hop.dt).params;
}

climber::ClimbSetup climb_setup(const ScenarioConfig& c, const dynamics::RobotParams& calibrated) {
  climber::ClimbSetup s;
  s.scenario = c.climb;
  s.terrain = c.terrain.params;
  s.grip = c.grip;
  s.tethers = build_tethers(c);
  s.robot = calibrated;
  s.body = c.body;
  return s;
}

}  // namespace cliffsim::config
