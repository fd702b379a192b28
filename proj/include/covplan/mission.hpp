#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covplan/coordination.hpp"

namespace covplan {

struct StepLogRow {
  int t = 0;
  int agent = 0;
  AgentState state;
  ControlInput u;
  int m_active = -1;
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

struct LoggedMessage {
  int t = 0;
  PlanMessage msg;
  std::string q_bits;  // sender's record at broadcast time
};

enum class MissionOutcome { Complete, MaxSteps, Collision };

struct MissionState {
  int t = 0;
  std::vector<AgentState> states;
  std::vector<CoverageRecord> records;  // per agent
  std::vector<int> active_pose;
  std::vector<StepLogRow> trajectory;
  std::vector<LoggedMessage> messages;
  std::vector<int> covered_by;  // ground-truth attribution, -1 = uncovered
  std::vector<int> covered_at;
  MissionOutcome outcome = MissionOutcome::MaxSteps;
  std::optional<int> completion_step;
  std::vector<std::string> warnings;
  std::vector<double> solve_time;  // per agent, seconds
  std::vector<long> solve_count;
  std::vector<long> node_count;
  std::vector<PlanDiagnostics> first_round_diag;  // per agent, t = 0
};

struct MissionMetrics {
  std::optional<int> completion_step;
  std::vector<int> covered_by;
  std::vector<int> covered_at;
  std::vector<double> path_length;      // per agent, m
  std::vector<double> mean_solve_time;  // per agent, s
  int steps = 0;
  long total_nodes = 0;
};

struct MissionSetup {
  std::vector<AgentState> agents;
  CommsModel comms;
  int max_steps = 200;
  std::vector<int> agent_order;  // planning order; empty = by index
};

struct CollisionViolation {
  int agent = -1;
  int other = -1;  // peer index, or -1 for an obstacle
  std::string what;
};

/// Agents strictly inside an obstacle (every face beyond the margin) or any
/// pair closer than r_safe. Points on a face plane are outside.
std::vector<CollisionViolation> check_collisions(const std::vector<AgentState>& states,
                                                 const std::vector<ObstacleRegion>& obstacles,
                                                 double r_safe, double margin = 1e-4);

/// Ground-truth coverage after one executed step: a point is covered when it
/// sits inside the executed FOV polytope and some bundle ray's last hit is
/// its host facet. First cover wins; same-step ties go to the lowest agent.
void update_coverage(const WorldModel& world, const std::vector<AgentState>& states,
                     const std::vector<int>& poses, std::vector<CoverageRecord>& records,
                     std::vector<int>& covered_by, std::vector<int>& covered_at, int t);

MissionMetrics compute_metrics(const MissionState& state);

/// Rolling-horizon loop: per-step coordination round, execution of first
/// controls and camera poses, exact-ray-cast coverage update, collision
/// check, and termination once every point is covered or steps run out.
MissionState run_mission(const WorldModel& world, const MissionSetup& setup);

}  // namespace covplan
