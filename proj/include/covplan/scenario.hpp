#pragma once

#include <string>
#include <vector>

#include "covplan/coordination.hpp"
#include "covplan/mission.hpp"

namespace covplan {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  std::string field;
  ValidationError(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

struct AgentInit {
  Vec3 pos;
  Vec3 vel;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Vec3 env_min{0, 0, 0};
  Vec3 env_max{100, 100, 100};
  DynamicsParams dyn;
  double vel_bound = 17.0;
  double input_bound = 10.0;
  CameraIntrinsics camera;
  std::vector<double> theta_deg{30, 70, 110, 150};
  std::vector<double> phi_deg{30, 90, 150, 210, 270, 330};
  int horizon = 0;  // required in the file
  double eta = 0.8;
  int n_rays = 50;
  int n_samples = 100;
  std::array<int, 3> grid_divisions{5, 5, 4};
  std::string object_mesh;
  std::vector<std::array<double, 4>> points;  // x, y, z, host facet
  std::vector<std::string> obstacle_meshes;
  std::vector<AgentInit> agents;
  CommsModel comms;
  std::uint64_t seed = 0;
  int max_steps = 200;
  double r_safe = 2.0;
  SolverOptions solver;
  std::vector<int> agent_order;  // empty = by index
  double tie_break_weight = 1e-3;
};

/// A loaded, validated scenario: the config plus resolved meshes and points.
struct Scenario {
  ScenarioConfig cfg;
  std::string dir;  // directory of the scenario file, for relative paths
  TriangleMesh object;
  PointsOfInterest points;
  std::vector<ObstacleRegion> obstacles;
};

Scenario load_scenario(const std::string& path);
/// Validation and mesh resolution for an in-memory config (mesh paths are
/// taken relative to `dir`).
Scenario resolve_scenario(ScenarioConfig cfg, const std::string& dir);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

/// World assembly for the mission loop. The catalog, grid, and visibility
/// map must outlive the returned WorldModel.
WorldModel make_world(const Scenario& sc, const CameraCatalog& catalog, const Grid& grid,
                      const VisibilityMap& vismap);
MissionSetup make_setup(const Scenario& sc);

}  // namespace covplan
