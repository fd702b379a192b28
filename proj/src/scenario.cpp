#include "covplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "covplan/mesh_io.hpp"
#include "json.hpp"

namespace covplan {

namespace {

using ordered_json = nlohmann::ordered_json;

Vec3 vec3_of(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(field, "expected [x, y, z]");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

Scenario resolve_scenario(ScenarioConfig cfg, const std::string& dir) {
  require(cfg.horizon >= 1, "horizon", "must be >= 1");
  require(cfg.dyn.dt > 0.0, "dynamics.dt", "must be positive");
  require(cfg.dyn.drag >= 0.0 && cfg.dyn.drag < 1.0, "dynamics.drag", "must be in [0, 1)");
  require(cfg.dyn.mass > 0.0, "dynamics.mass", "must be positive");
  require(cfg.vel_bound > 0.0, "bounds.velocity", "must be positive");
  require(cfg.input_bound > 0.0, "bounds.input", "must be positive");
  require(cfg.camera.base_len > 0.0 && cfg.camera.base_wid > 0.0 && cfg.camera.range > 0.0,
          "camera", "dimensions must be positive");
  require(!cfg.theta_deg.empty(), "camera_angles.theta_deg", "must be non-empty");
  require(!cfg.phi_deg.empty(), "camera_angles.phi_deg", "must be non-empty");
  for (double t : cfg.theta_deg) {
    require(t >= 0.0 && t < 180.0, "camera_angles.theta_deg", "values must be in [0, 180)");
  }
  for (double p : cfg.phi_deg) {
    require(p >= 0.0 && p < 360.0, "camera_angles.phi_deg", "values must be in [0, 360)");
  }
  require(cfg.env_max.x > cfg.env_min.x && cfg.env_max.y > cfg.env_min.y &&
              cfg.env_max.z > cfg.env_min.z,
          "env", "max must exceed min on every axis");
  require(cfg.eta >= 0.0, "eta", "must be non-negative");
  require(cfg.n_rays >= 1, "n_rays", "must be >= 1");
  require(cfg.n_samples >= 1, "n_samples", "must be >= 1");
  for (int d : cfg.grid_divisions) require(d >= 1, "grid_divisions", "must be >= 1");
  require(!cfg.object_mesh.empty(), "object_mesh", "required");
  require(!cfg.agents.empty(), "agents", "need at least one agent");
  require(cfg.max_steps >= 0, "max_steps", "must be >= 0");
  require(cfg.r_safe >= 0.0, "r_safe", "must be >= 0");
  require(cfg.solver.gap_abs > 0.0, "solver.gap", "must be positive");
  require(cfg.solver.node_limit > 0, "solver.node_limit", "must be positive");
  require(cfg.solver.time_limit > 0.0, "solver.time_limit", "must be positive");
  require(cfg.tie_break_weight >= 0.0, "tie_break_weight", "must be >= 0");
  if (cfg.comms.mode == CommsModel::Mode::Range) {
    require(cfg.comms.range > 0.0, "comms.range", "must be positive in range mode");
  }
  if (!cfg.agent_order.empty()) {
    require(cfg.agent_order.size() == cfg.agents.size(), "agent_order",
            "must list every agent exactly once");
    std::set<int> seen(cfg.agent_order.begin(), cfg.agent_order.end());
    require(seen.size() == cfg.agents.size() && *seen.begin() == 0 &&
                *seen.rbegin() == static_cast<int>(cfg.agents.size()) - 1,
            "agent_order", "must be a permutation of 0..N-1");
  }

  Scenario sc;
  sc.dir = dir;
  auto resolve = [&dir](const std::string& p) {
    if (p.empty() || p.front() == '/' || dir.empty()) return p;
    return dir + "/" + p;
  };
  sc.object = load_mesh(resolve(cfg.object_mesh));
  require(!sc.object.facets.empty(), "object_mesh", "mesh has no facets");

  sc.points.reserve(cfg.points.size());
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const auto& row = cfg.points[i];
    const std::string field = "points[" + std::to_string(i) + "]";
    const Vec3 p{row[0], row[1], row[2]};
    const double fidx = row[3];
    require(fidx >= 0 && fidx == std::floor(fidx), field, "facet index must be an integer >= 0");
    const std::size_t facet = static_cast<std::size_t>(fidx);
    require(facet < sc.object.facets.size(), field, "facet index out of range");
    const Facet& f = sc.object.facets[facet];
    const Plane pl = plane_from_facet(f);
    require(std::abs(pl.eval(p)) <= 1e-6, field, "point is off its host facet plane");
    const Vec3 e1 = f.v[1] - f.v[0], e2 = f.v[2] - f.v[0], w = p - f.v[0];
    const double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
    const double det = d11 * d22 - d12 * d12;
    const double s = (d22 * dot(w, e1) - d12 * dot(w, e2)) / det;
    const double t = (d11 * dot(w, e2) - d12 * dot(w, e1)) / det;
    require(s >= -1e-9 && t >= -1e-9 && s + t <= 1.0 + 1e-9, field,
            "point is outside its host facet triangle");
    sc.points.push_back(PointOfInterest{p, facet});
  }

  for (const std::string& path : cfg.obstacle_meshes) {
    TriangleMesh mesh = load_mesh(resolve(path));
    ObstacleRegion region;
    try {
      region.poly = convex_object_halfspaces(mesh);
    } catch (const NonConvexInput& e) {
      throw ValidationError("obstacles(" + path + ")", e.what());
    }
    region.box = mesh.bounds();
    region.label = path;
    sc.obstacles.push_back(std::move(region));
  }

  for (std::size_t n = 0; n < cfg.agents.size(); ++n) {
    const std::string field = "agents[" + std::to_string(n) + "]";
    const Vec3& p = cfg.agents[n].pos;
    require(p.x >= cfg.env_min.x && p.x <= cfg.env_max.x && p.y >= cfg.env_min.y &&
                p.y <= cfg.env_max.y && p.z >= cfg.env_min.z && p.z <= cfg.env_max.z,
            field, "initial position outside the environment");
    for (const ObstacleRegion& region : sc.obstacles) {
      bool inside = true;
      for (const Plane& pl : region.poly.halfspaces) {
        if (pl.eval(p) > -1e-9) {
          inside = false;
          break;
        }
      }
      require(!inside, field, "initial position inside obstacle " + region.label);
    }
  }

  sc.cfg = std::move(cfg);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  ScenarioConfig cfg;
  try {
    if (j.contains("name")) cfg.name = j["name"].get<std::string>();
    if (j.contains("env")) {
      cfg.env_min = vec3_of(j["env"]["min"], "env.min");
      cfg.env_max = vec3_of(j["env"]["max"], "env.max");
    }
    if (j.contains("dynamics")) {
      const auto& d = j["dynamics"];
      if (d.contains("dt")) cfg.dyn.dt = d["dt"].get<double>();
      if (d.contains("drag")) cfg.dyn.drag = d["drag"].get<double>();
      if (d.contains("mass")) cfg.dyn.mass = d["mass"].get<double>();
    }
    if (j.contains("bounds")) {
      const auto& b = j["bounds"];
      if (b.contains("velocity")) cfg.vel_bound = b["velocity"].get<double>();
      if (b.contains("input")) cfg.input_bound = b["input"].get<double>();
    }
    if (j.contains("camera")) {
      const auto& c = j["camera"];
      if (c.contains("base_len")) cfg.camera.base_len = c["base_len"].get<double>();
      if (c.contains("base_wid")) cfg.camera.base_wid = c["base_wid"].get<double>();
      if (c.contains("range")) cfg.camera.range = c["range"].get<double>();
    }
    if (j.contains("camera_angles")) {
      const auto& a = j["camera_angles"];
      if (a.contains("theta_deg")) cfg.theta_deg = a["theta_deg"].get<std::vector<double>>();
      if (a.contains("phi_deg")) cfg.phi_deg = a["phi_deg"].get<std::vector<double>>();
    }
    if (!j.contains("horizon")) throw ValidationError("horizon", "required field is missing");
    cfg.horizon = j["horizon"].get<int>();
    if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
    if (j.contains("n_rays")) cfg.n_rays = j["n_rays"].get<int>();
    if (j.contains("n_samples")) cfg.n_samples = j["n_samples"].get<int>();
    if (j.contains("grid_divisions")) {
      const auto& g = j["grid_divisions"];
      if (!g.is_array() || g.size() != 3) {
        throw ValidationError("grid_divisions", "expected [gx, gy, gz]");
      }
      cfg.grid_divisions = {g[0].get<int>(), g[1].get<int>(), g[2].get<int>()};
    }
    if (!j.contains("object_mesh")) {
      throw ValidationError("object_mesh", "required field is missing");
    }
    cfg.object_mesh = j["object_mesh"].get<std::string>();
    cfg.points.clear();
    for (const auto& p : j.value("points", nlohmann::json::array())) {
      if (!p.is_array() || p.size() != 4) {
        throw ValidationError("points", "expected [x, y, z, facet] rows");
      }
      cfg.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(),
                            p[3].get<double>()});
    }
    for (const auto& o : j.value("obstacles", nlohmann::json::array())) {
      cfg.obstacle_meshes.push_back(o.get<std::string>());
    }
    if (!j.contains("agents")) throw ValidationError("agents", "required field is missing");
    for (const auto& a : j["agents"]) {
      AgentInit init;
      init.pos = vec3_of(a.at("pos"), "agents.pos");
      if (a.contains("vel")) init.vel = vec3_of(a["vel"], "agents.vel");
      cfg.agents.push_back(init);
    }
    if (j.contains("comms")) {
      const auto& c = j["comms"];
      const std::string mode = c.value("mode", "full");
      if (mode == "full") cfg.comms.mode = CommsModel::Mode::Full;
      else if (mode == "range") cfg.comms.mode = CommsModel::Mode::Range;
      else if (mode == "none") cfg.comms.mode = CommsModel::Mode::None;
      else throw ValidationError("comms.mode", "must be full, range, or none");
      if (c.contains("range")) cfg.comms.range = c["range"].get<double>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("max_steps")) cfg.max_steps = j["max_steps"].get<int>();
    if (j.contains("r_safe")) cfg.r_safe = j["r_safe"].get<double>();
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      if (s.contains("gap")) cfg.solver.gap_abs = s["gap"].get<double>();
      if (s.contains("node_limit")) cfg.solver.node_limit = s["node_limit"].get<long>();
      if (s.contains("time_limit")) cfg.solver.time_limit = s["time_limit"].get<double>();
      if (s.contains("int_tol")) cfg.solver.int_tol = s["int_tol"].get<double>();
    }
    if (j.contains("agent_order")) cfg.agent_order = j["agent_order"].get<std::vector<int>>();
    if (j.contains("tie_break_weight")) {
      cfg.tie_break_weight = j["tie_break_weight"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return resolve_scenario(std::move(cfg), dir);
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["env"] = {{"min", {cfg.env_min.x, cfg.env_min.y, cfg.env_min.z}},
              {"max", {cfg.env_max.x, cfg.env_max.y, cfg.env_max.z}}};
  j["dynamics"] = {{"dt", cfg.dyn.dt}, {"drag", cfg.dyn.drag}, {"mass", cfg.dyn.mass}};
  j["bounds"] = {{"velocity", cfg.vel_bound}, {"input", cfg.input_bound}};
  j["camera"] = {{"base_len", cfg.camera.base_len},
                 {"base_wid", cfg.camera.base_wid},
                 {"range", cfg.camera.range}};
  j["camera_angles"] = {{"theta_deg", cfg.theta_deg}, {"phi_deg", cfg.phi_deg}};
  j["horizon"] = cfg.horizon;
  j["eta"] = cfg.eta;
  j["n_rays"] = cfg.n_rays;
  j["n_samples"] = cfg.n_samples;
  j["grid_divisions"] = cfg.grid_divisions;
  j["object_mesh"] = cfg.object_mesh;
  j["points"] = cfg.points;
  j["obstacles"] = cfg.obstacle_meshes;
  j["agents"] = ordered_json::array();
  for (const AgentInit& a : cfg.agents) {
    j["agents"].push_back({{"pos", {a.pos.x, a.pos.y, a.pos.z}},
                           {"vel", {a.vel.x, a.vel.y, a.vel.z}}});
  }
  const char* mode = cfg.comms.mode == CommsModel::Mode::Full
                         ? "full"
                         : (cfg.comms.mode == CommsModel::Mode::Range ? "range" : "none");
  j["comms"] = {{"mode", mode}, {"range", cfg.comms.range}};
  j["seed"] = cfg.seed;
  j["max_steps"] = cfg.max_steps;
  j["r_safe"] = cfg.r_safe;
  j["solver"] = {{"gap", cfg.solver.gap_abs},
                 {"node_limit", cfg.solver.node_limit},
                 {"time_limit", cfg.solver.time_limit},
                 {"int_tol", cfg.solver.int_tol}};
  if (!cfg.agent_order.empty()) j["agent_order"] = cfg.agent_order;
  j["tie_break_weight"] = cfg.tie_break_weight;
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_scenario(cfg);
  if (!out) throw std::runtime_error("write failed for " + path);
}

WorldModel make_world(const Scenario& sc, const CameraCatalog& catalog, const Grid& grid,
                      const VisibilityMap& vismap) {
  WorldModel world;
  world.mesh = &sc.object;
  world.points = &sc.points;
  world.catalog = &catalog;
  world.grid = &grid;
  world.vismap = &vismap;
  world.obstacles = sc.obstacles;
  world.env_min = sc.cfg.env_min;
  world.env_max = sc.cfg.env_max;
  world.dyn = sc.cfg.dyn;
  world.vel_bound = sc.cfg.vel_bound;
  world.input_bound = sc.cfg.input_bound;
  world.horizon = sc.cfg.horizon;
  world.eta = sc.cfg.eta;
  world.r_safe = sc.cfg.r_safe;
  world.tie_break_weight = sc.cfg.tie_break_weight;
  world.solver = sc.cfg.solver;
  world.agent_count = static_cast<int>(sc.cfg.agents.size());
  world.n_rays = sc.cfg.n_rays;
  return world;
}

MissionSetup make_setup(const Scenario& sc) {
  MissionSetup setup;
  for (const AgentInit& a : sc.cfg.agents) setup.agents.push_back(AgentState{a.pos, a.vel});
  setup.comms = sc.cfg.comms;
  setup.max_steps = sc.cfg.max_steps;
  setup.agent_order = sc.cfg.agent_order;
  return setup;
}

}  // namespace covplan
