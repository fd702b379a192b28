#include "covplan/mission.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace covplan {

std::vector<CollisionViolation> check_collisions(const std::vector<AgentState>& states,
                                                 const std::vector<ObstacleRegion>& obstacles,
                                                 double r_safe, double margin) {
  std::vector<CollisionViolation> out;
  for (std::size_t n = 0; n < states.size(); ++n) {
    for (std::size_t o = 0; o < obstacles.size(); ++o) {
      bool inside = true;
      for (const Plane& pl : obstacles[o].poly.halfspaces) {
        if (pl.eval(states[n].pos) > -margin) {
          inside = false;
          break;
        }
      }
      if (inside) {
        out.push_back(CollisionViolation{static_cast<int>(n), -1,
                                         "agent " + std::to_string(n) + " inside obstacle " +
                                             obstacles[o].label});
      }
    }
    for (std::size_t k = n + 1; k < states.size(); ++k) {
      const double d = norm(states[n].pos - states[k].pos);
      if (d < r_safe) {
        out.push_back(CollisionViolation{static_cast<int>(n), static_cast<int>(k),
                                         "agents " + std::to_string(n) + " and " +
                                             std::to_string(k) + " separated by " +
                                             std::to_string(d) + " m"});
      }
    }
  }
  return out;
}

void update_coverage(const WorldModel& world, const std::vector<AgentState>& states,
                     const std::vector<int>& poses, std::vector<CoverageRecord>& records,
                     std::vector<int>& covered_by, std::vector<int>& covered_at, int t) {
  const PointsOfInterest& points = *world.points;
  for (std::size_t n = 0; n < states.size(); ++n) {
    if (poses[n] < 0) continue;
    const PosedFov fov = pose_fov(*world.catalog, static_cast<std::size_t>(poses[n]),
                                  states[n].pos);
    // facets seen by the executed bundle
    std::vector<std::uint8_t> seen(world.mesh->facets.size(), 0);
    const RayBundle bundle =
        ray_bundle(fov.vertices, static_cast<std::size_t>(world.n_rays));
    for (const Ray& ray : bundle.rays) {
      if (const auto hit = last_hit(ray, *world.mesh)) seen[*hit] = 1;
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (covered_by[p] >= 0) continue;  // first cover wins
      if (!seen[points[p].facet]) continue;
      if (!point_in_polytope(fov.polytope, points[p].p, 1e-6)) continue;
      covered_by[p] = static_cast<int>(n);
      covered_at[p] = t;
      records[n].q[p] = 1;
    }
  }
}

MissionMetrics compute_metrics(const MissionState& state) {
  MissionMetrics m;
  m.completion_step = state.completion_step;
  m.covered_by = state.covered_by;
  m.covered_at = state.covered_at;
  m.steps = state.t;
  m.total_nodes = std::accumulate(state.node_count.begin(), state.node_count.end(), 0L);

  const std::size_t agents = state.states.size();
  m.path_length.assign(agents, 0.0);
  std::vector<std::optional<Vec3>> last(agents);
  for (const StepLogRow& row : state.trajectory) {
    const std::size_t n = static_cast<std::size_t>(row.agent);
    if (last[n]) m.path_length[n] += norm(row.state.pos - *last[n]);
    last[n] = row.state.pos;
  }
  m.mean_solve_time.assign(agents, 0.0);
  for (std::size_t n = 0; n < agents; ++n) {
    if (state.solve_count[n] > 0) {
      m.mean_solve_time[n] = state.solve_time[n] / static_cast<double>(state.solve_count[n]);
    }
  }
  return m;
}

namespace {

std::string bits(const std::vector<std::uint8_t>& q) {
  std::string s(q.size(), '0');
  for (std::size_t i = 0; i < q.size(); ++i) s[i] = q[i] ? '1' : '0';
  return s;
}

}  // namespace

MissionState run_mission(const WorldModel& world, const MissionSetup& setup) {
  const std::size_t N = setup.agents.size();
  const std::size_t P = world.points->size();

  MissionState ms;
  ms.states = setup.agents;
  ms.records.assign(N, CoverageRecord{std::vector<std::uint8_t>(P, 0)});
  ms.active_pose.assign(N, -1);
  ms.covered_by.assign(P, -1);
  ms.covered_at.assign(P, -1);
  ms.solve_time.assign(N, 0.0);
  ms.solve_count.assign(N, 0);
  ms.node_count.assign(N, 0);
  ms.first_round_diag.resize(N);

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  if (!setup.agent_order.empty()) order = setup.agent_order;

  std::vector<PlanMessage> prev_plans(N);
  for (std::size_t n = 0; n < N; ++n) {
    prev_plans[n].agent = static_cast<int>(n);
    prev_plans[n].t = -1;  // bootstrap: empty previous plan
    ms.trajectory.push_back(StepLogRow{0, static_cast<int>(n), ms.states[n], ControlInput{}, -1,
                                       0.0, 0.0});
  }

  auto covered_all = [&]() {
    return std::all_of(ms.covered_by.begin(), ms.covered_by.end(), [](int c) { return c >= 0; });
  };

  while (true) {
    if (covered_all()) {
      ms.outcome = MissionOutcome::Complete;
      ms.completion_step = ms.t;
      break;
    }
    if (ms.t >= setup.max_steps) {
      ms.outcome = MissionOutcome::MaxSteps;
      break;
    }

    std::vector<AgentSnapshot> snaps(N);
    for (std::size_t n = 0; n < N; ++n) {
      snaps[n] = AgentSnapshot{ms.states[n], ms.records[n], prev_plans[n]};
    }
    CoordinationRound round = exchange_round(ms.t, std::move(snaps), setup.comms);

    std::vector<PlanStepResult> results(N);
    for (int n : order) {
      const Inbox inbox = round.inbox_for(n);
      PlanStepResult res =
          plan_step(n, ms.states[static_cast<std::size_t>(n)],
                    ms.records[static_cast<std::size_t>(n)], inbox, world, ms.t,
                    std::max(0, ms.active_pose[static_cast<std::size_t>(n)]));
      round.record_plan(res.message);
      ms.messages.push_back(
          LoggedMessage{ms.t, res.message, bits(ms.records[static_cast<std::size_t>(n)].q)});
      ms.solve_time[static_cast<std::size_t>(n)] += res.diag.stats.wall_time;
      ms.solve_count[static_cast<std::size_t>(n)] += 1;
      ms.node_count[static_cast<std::size_t>(n)] += res.diag.stats.nodes;
      if (ms.t == 0) ms.first_round_diag[static_cast<std::size_t>(n)] = res.diag;
      results[static_cast<std::size_t>(n)] = std::move(res);
    }

    for (std::size_t n = 0; n < N; ++n) {
      ms.states[n] = step_dynamics(ms.states[n], results[n].u, world.dyn);
      // the planner keeps trajectories in bounds; clamp and flag drift
      for (int ax = 0; ax < 3; ++ax) {
        double* pv = ax == 0 ? &ms.states[n].pos.x : (ax == 1 ? &ms.states[n].pos.y : &ms.states[n].pos.z);
        const double lo = world.env_min[ax], hi = world.env_max[ax];
        if (*pv < lo - 1e-6 || *pv > hi + 1e-6) {
          ms.warnings.push_back("bound violation: agent " + std::to_string(n) + " axis " +
                                std::to_string(ax) + " at t=" + std::to_string(ms.t + 1));
        }
        *pv = std::min(std::max(*pv, lo), hi);
        double* vv = ax == 0 ? &ms.states[n].vel.x : (ax == 1 ? &ms.states[n].vel.y : &ms.states[n].vel.z);
        if (std::abs(*vv) > world.vel_bound + 1e-6) {
          ms.warnings.push_back("velocity bound violation: agent " + std::to_string(n) +
                                " at t=" + std::to_string(ms.t + 1));
        }
        *vv = std::min(std::max(*vv, -world.vel_bound), world.vel_bound);
      }
      ms.active_pose[n] = results[n].m_active;
      prev_plans[n] = results[n].message;
    }

    ms.t += 1;
    update_coverage(world, ms.states, ms.active_pose, ms.records, ms.covered_by, ms.covered_at,
                    ms.t);

    for (std::size_t n = 0; n < N; ++n) {
      const CameraPose& pose =
          world.catalog->poses[static_cast<std::size_t>(ms.active_pose[n])];
      ms.trajectory.push_back(StepLogRow{ms.t, static_cast<int>(n), ms.states[n], results[n].u,
                                         ms.active_pose[n], pose.theta_deg, pose.phi_deg});
    }

    const auto violations = check_collisions(ms.states, world.obstacles, world.r_safe);
    if (!violations.empty()) {
      for (const auto& v : violations) ms.warnings.push_back("collision: " + v.what);
      ms.outcome = MissionOutcome::Collision;
      break;
    }
  }
  return ms;
}

}  // namespace covplan
