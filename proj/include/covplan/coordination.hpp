#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covplan/milp_builder.hpp"
#include "covplan/milp_solver.hpp"

namespace covplan {

struct PlanEntry {
  int point = 0;
  int pose = 0;
  int tau = 0;
};

/// Coverage schedule broadcast by one agent: the (point, pose, tau) triples
/// it intends to cover inside its horizon. Each point appears at most once.
struct PlanMessage {
  int agent = -1;
  int t = -1;  // planning step the schedule was produced at
  enum class Age { Current, Previous } age = Age::Current;
  std::vector<PlanEntry> schedule;  // sorted by (point, pose, tau)
};

struct CoverageRecord {
  std::vector<std::uint8_t> q;
  int covered_count() const;
};

struct CommsModel {
  enum class Mode { Full, Range, None } mode = Mode::Full;
  double range = 3.0;  // m, Range mode only
};

struct AssignmentResult {
  std::vector<int> target_of_row;  // per row: column index, or -1 for a dummy
  double total_cost = 0.0;
};

/// Minimum-cost assignment (Hungarian); rectangular inputs are padded with
/// zero-cost dummies. Ties break toward the lexicographically smallest
/// assignment vector, dummies sorting after real columns.
AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost);

struct Inbox {
  std::vector<PlanMessage> plans;                       // peers' schedules
  std::vector<std::pair<int, CoverageRecord>> records;  // (agent, record)
  std::vector<std::pair<int, Vec3>> positions;          // (agent, position)
};

/// Nearest-unobserved-point selection. With every peer position known the
/// team solves one joint assignment over agents x unobserved points;
/// otherwise the agent falls back to the greedy argmin over its own
/// unobserved list (ties to the lowest point index). Empty when nothing is
/// left to observe.
std::optional<int> guidance_target(int agent, int agent_count, const Vec3& own_pos,
                                   const Inbox& inbox, const std::vector<std::uint8_t>& merged_q,
                                   const PointsOfInterest& points);

struct AgentSnapshot {
  AgentState state;
  CoverageRecord record;
  PlanMessage prev_plan;
};

/// One sequential coordination round at step t. Agents plan in index order;
/// agent n's inbox carries current-step plans from agents before it,
/// previous-step plans from agents after it, and every reachable peer's
/// record and position.
class CoordinationRound {
 public:
  CoordinationRound(int t, std::vector<AgentSnapshot> agents, CommsModel comms);
  Inbox inbox_for(int agent) const;
  void record_plan(const PlanMessage& msg);
  int step() const { return t_; }

 private:
  int t_ = 0;
  CommsModel comms_;
  std::vector<AgentSnapshot> agents_;
  std::vector<std::optional<PlanMessage>> current_;
};

CoordinationRound exchange_round(int t, std::vector<AgentSnapshot> agents,
                                 const CommsModel& comms);

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable per-mission world data shared by every plan_step call.
struct WorldModel {
  const TriangleMesh* mesh = nullptr;
  const PointsOfInterest* points = nullptr;
  const CameraCatalog* catalog = nullptr;
  const Grid* grid = nullptr;
  const VisibilityMap* vismap = nullptr;
  std::vector<ObstacleRegion> obstacles;
  Vec3 env_min, env_max;
  DynamicsParams dyn;
  double vel_bound = 17.0;
  double input_bound = 10.0;
  int horizon = 1;
  double eta = 0.8;
  double r_safe = 2.0;
  double tie_break_weight = 0.0;
  SolverOptions solver;
  int agent_count = 1;
  int n_rays = 50;
  std::string debug_dir = ".";  // destination for failure MPS dumps
};

struct PlanDiagnostics {
  int continuous = 0;
  int binaries = 0;
  int rows = 0;
  int candidates = 0;
  double objective = 0.0;
  MilpStatus status = MilpStatus::Optimal;
  SolveStats stats;
};

struct PlanStepResult {
  ControlInput u;          // first predicted control
  int m_active = 0;        // argmax mu at tau = 1
  PlanMessage message;     // full xidot schedule for broadcast
  PlanDiagnostics diag;
};

/// Assembles the horizon context from the inbox (merged record, peer claims,
/// guidance target, peer safety regions), builds the agent model, solves it,
/// and extracts the first control, active camera pose, and schedule.
PlanStepResult plan_step(int agent, const AgentState& state, const CoverageRecord& own,
                         const Inbox& inbox, const WorldModel& world, int t, int fallback_pose);

/// Context assembly alone (shared by plan_step and the model exporter).
HorizonContext make_horizon_context(int agent, const AgentState& state, const CoverageRecord& own,
                                    const Inbox& inbox, const WorldModel& world, int t);

}  // namespace covplan
