#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "covplan/geometry.hpp"
#include "covplan/milp_model.hpp"
#include "covplan/vehicle.hpp"
#include "covplan/visibility.hpp"

namespace covplan {

/// Big-M constants per constraint family, each valid over the whole
/// environment box (max attainable violation plus one).
struct BigMConfig {
  double hull = 0.0;
  double cell = 0.0;
  double obstacle = 0.0;
  double margin = 1e-4;  // strictness delta for obstacle faces
};

struct ObstacleRegion {
  ConvexPolytope poly;
  Aabb box;  // bounding box, used only for vacuous-region pruning
  std::string label;
};

/// One allowed (tau, camera pose, point) coverage option after pruning.
struct Candidate {
  int tau = 1;  // 1..T
  int pose = 0;
  int point = 0;
};

struct HorizonContext {
  int T = 1;
  AgentState x0;
  const CameraCatalog* catalog = nullptr;
  const VisibilityMap* vismap = nullptr;
  const Grid* grid = nullptr;
  const PointsOfInterest* points = nullptr;

  std::vector<std::uint8_t> merged_q;  // per point, own record OR peers'
  std::vector<int> peer_load;          // per point, peer-scheduled coverage count
  std::vector<ObstacleRegion> avoid;   // obstacles + peer safety regions
  std::optional<Vec3> guidance_target;
  double eta = 0.8;
  double tie_break_weight = 0.0;  // small reward on first-step verified sightings

  Vec3 env_min, env_max;
  double vel_bound = 17.0;
  double input_bound = 10.0;
  DynamicsParams dyn;
  BigMConfig big_m;

  std::vector<Candidate> candidates;             // sorted (tau, pose, point)
  std::vector<std::vector<int>> reach_cells;     // per tau-1: sorted cell ids
  int agent_id = 0;
  int step = 0;
};

/// Axis-aligned over-approximation of positions reachable within tau steps,
/// clamped to the environment box.
Aabb reach_box(const HorizonContext& ctx, int tau);

BigMConfig compute_big_m(const Vec3& env_min, const Vec3& env_max, const CameraCatalog& catalog,
                         const std::vector<ObstacleRegion>& avoid, double margin = 1e-4);

std::vector<std::vector<int>> reachable_cells(const HorizonContext& ctx);

/// Build-time candidate fixing: drops (tau, m, p) triples whose point is
/// already covered or peer-claimed, out of reach, invisible from every
/// reachable cell, or whose FOV pose cannot face the point from anywhere in
/// the reach box. All drops are solution-preserving.
std::vector<Candidate> prune_candidates(const HorizonContext& ctx);

/// Fills reach_cells, big_m, and candidates from the remaining fields.
void prepare_context(HorizonContext& ctx);

struct CandidateVars {
  int xi = -1;
  std::array<int, 5> xit{-1, -1, -1, -1, -1};
  int xibar = -1;
  int xihat = -1;
  int xidot = -1;
};

struct VariableLayout {
  int T = 0;
  int poses = 0;
  std::vector<std::array<int, 3>> x_pos, x_vel, u;        // [tau-1][axis]
  std::vector<int> mu;                                    // [(tau-1)*poses + m], -1 absent
  std::vector<std::vector<std::pair<int, int>>> varpi;    // per tau-1: (cell, var)
  std::map<std::tuple<int, int, int>, CandidateVars> cand;  // key (tau, pose, point)
  std::array<int, 3> e_pos{-1, -1, -1}, e_neg{-1, -1, -1};

  int mu_var(int tau, int m) const { return mu.empty() ? -1 : mu[(tau - 1) * poses + m]; }
  int varpi_var(int tau, int cell) const;
};

// Problem construction, one sub-structure at a time. All constraints are
// linear; FOV face normals are constants per precomputed pose, so the posed
// face offset beta0 + dot(alpha, x_p) stays affine in the position variables.
void add_dynamics_and_bounds(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx);
void add_hull_membership(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx,
                         int tau, int pose, int point);
void add_camera_selection_and_conjunction(MilpModel& model, VariableLayout& layout,
                                          const HorizonContext& ctx);
void add_dedup_and_complementarity(MilpModel& model, VariableLayout& layout,
                                   const HorizonContext& ctx);
void add_collision_avoidance(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx);
void set_objective(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx);

struct BuiltModel {
  MilpModel model;
  VariableLayout layout;
};

BuiltModel build_agent_model(const HorizonContext& ctx);

ConvexPolytope peer_safety_octahedron(const Vec3& center, double r_safe);

}  // namespace covplan
