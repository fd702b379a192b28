#include "covplan/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covplan {

int CoverageRecord::covered_count() const {
  return static_cast<int>(std::count(q.begin(), q.end(), std::uint8_t{1}));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTie = 1e-9;

// Square Kuhn-Munkres with row/column potentials, O(n^3).
double hungarian_square(const std::vector<std::vector<double>>& cost, std::vector<int>& rowsol) {
  const int n = static_cast<int>(cost.size());
  rowsol.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) return 0.0;
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      rowsol[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
      total += cost[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)]
                   [static_cast<std::size_t>(j - 1)];
    }
  }
  return total;
}

// Optimal value of the assignment restricted to `rows` x `cols`.
double restricted_optimum(const std::vector<std::vector<double>>& cost,
                          const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) return 0.0;
  std::vector<std::vector<double>> sub(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sub[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          cost[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]
              [static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])];
    }
  }
  std::vector<int> sol;
  return hungarian_square(sub, sol);
}

}  // namespace

AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(cost[0].size());
  if (rows == 0) return {};
  const int n = std::max(rows, cols);

  std::vector<std::vector<double>> padded(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      padded[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }

  std::vector<int> sol;
  const double best = hungarian_square(padded, sol);

  // Lexicographic refinement: fix each row in turn to the smallest column
  // that still allows the optimal total. Dummy columns sort last.
  std::vector<int> remaining_cols(static_cast<std::size_t>(n));
  std::iota(remaining_cols.begin(), remaining_cols.end(), 0);
  std::vector<int> rows_left(static_cast<std::size_t>(n));
  std::iota(rows_left.begin(), rows_left.end(), 0);

  AssignmentResult out;
  out.target_of_row.assign(static_cast<std::size_t>(rows), -1);
  double fixed_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    rows_left.erase(rows_left.begin());
    int chosen = -1;
    for (std::size_t k = 0; k < remaining_cols.size(); ++k) {
      const int j = remaining_cols[k];
      const double cij = padded[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      std::vector<int> rest = remaining_cols;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      const double total = fixed_cost + cij + restricted_optimum(padded, rows_left, rest);
      if (total <= best + kCostTie) {
        chosen = j;
        fixed_cost += cij;
        remaining_cols = std::move(rest);
        break;
      }
    }
    if (chosen < 0) {  // numerical fallback: keep the unrefined solution
      chosen = sol[static_cast<std::size_t>(i)];
      remaining_cols.erase(std::remove(remaining_cols.begin(), remaining_cols.end(), chosen),
                           remaining_cols.end());
      fixed_cost += padded[static_cast<std::size_t>(i)][static_cast<std::size_t>(chosen)];
    }
    if (i < rows) {
      out.target_of_row[static_cast<std::size_t>(i)] = chosen < cols ? chosen : -1;
    }
  }
  out.total_cost = best;
  return out;
}

std::optional<int> guidance_target(int agent, int agent_count, const Vec3& own_pos,
                                   const Inbox& inbox, const std::vector<std::uint8_t>& merged_q,
                                   const PointsOfInterest& points) {
  std::vector<int> unobserved;
  for (std::size_t p = 0; p < merged_q.size(); ++p) {
    if (!merged_q[p]) unobserved.push_back(static_cast<int>(p));
  }
  if (unobserved.empty()) return std::nullopt;

  const bool full_view = static_cast<int>(inbox.positions.size()) == agent_count - 1;
  if (!full_view) {
    int best = unobserved.front();
    double best_d = kInf;
    for (int p : unobserved) {
      const Vec3 d = points[static_cast<std::size_t>(p)].p - own_pos;
      const double dist = dot(d, d);
      if (dist < best_d - kCostTie) {
        best_d = dist;
        best = p;
      }
    }
    return best;
  }

  // joint assignment over all agents x unobserved points
  std::vector<Vec3> agent_pos(static_cast<std::size_t>(agent_count));
  agent_pos[static_cast<std::size_t>(agent)] = own_pos;
  for (const auto& [id, pos] : inbox.positions) agent_pos[static_cast<std::size_t>(id)] = pos;

  std::vector<std::vector<double>> cost(static_cast<std::size_t>(agent_count),
                                        std::vector<double>(unobserved.size(), 0.0));
  for (int k = 0; k < agent_count; ++k) {
    for (std::size_t c = 0; c < unobserved.size(); ++c) {
      cost[static_cast<std::size_t>(k)][c] =
          norm(points[static_cast<std::size_t>(unobserved[c])].p -
               agent_pos[static_cast<std::size_t>(k)]);
    }
  }
  const AssignmentResult res = solve_assignment(cost);
  const int col = res.target_of_row[static_cast<std::size_t>(agent)];
  if (col < 0) return std::nullopt;  // matched to a dummy: fewer points than agents
  return unobserved[static_cast<std::size_t>(col)];
}

CoordinationRound::CoordinationRound(int t, std::vector<AgentSnapshot> agents, CommsModel comms)
    : t_(t), comms_(comms), agents_(std::move(agents)) {
  current_.resize(agents_.size());
}

CoordinationRound exchange_round(int t, std::vector<AgentSnapshot> agents,
                                 const CommsModel& comms) {
  return CoordinationRound(t, std::move(agents), comms);
}

Inbox CoordinationRound::inbox_for(int agent) const {
  Inbox inbox;
  const Vec3 own = agents_[static_cast<std::size_t>(agent)].state.pos;
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    if (static_cast<int>(k) == agent) continue;
    if (comms_.mode == CommsModel::Mode::None) continue;
    if (comms_.mode == CommsModel::Mode::Range &&
        norm(agents_[k].state.pos - own) > comms_.range) {
      continue;
    }
    inbox.records.emplace_back(static_cast<int>(k), agents_[k].record);
    inbox.positions.emplace_back(static_cast<int>(k), agents_[k].state.pos);
    if (static_cast<int>(k) < agent) {
      if (current_[k]) {
        inbox.plans.push_back(*current_[k]);
      }
    } else {
      PlanMessage prev = agents_[k].prev_plan;
      prev.age = PlanMessage::Age::Previous;
      inbox.plans.push_back(prev);
    }
  }
  return inbox;
}

void CoordinationRound::record_plan(const PlanMessage& msg) {
  current_[static_cast<std::size_t>(msg.agent)] = msg;
}

HorizonContext make_horizon_context(int agent, const AgentState& state, const CoverageRecord& own,
                                    const Inbox& inbox, const WorldModel& world, int t) {
  HorizonContext ctx;
  ctx.T = world.horizon;
  ctx.x0 = state;
  ctx.catalog = world.catalog;
  ctx.vismap = world.vismap;
  ctx.grid = world.grid;
  ctx.points = world.points;
  ctx.env_min = world.env_min;
  ctx.env_max = world.env_max;
  ctx.vel_bound = world.vel_bound;
  ctx.input_bound = world.input_bound;
  ctx.dyn = world.dyn;
  ctx.eta = world.eta;
  ctx.tie_break_weight = world.tie_break_weight;
  ctx.agent_id = agent;
  ctx.step = t;

  const std::size_t np = world.points->size();
  ctx.merged_q.assign(np, 0);
  for (std::size_t p = 0; p < np; ++p) ctx.merged_q[p] = own.q[p];
  for (const auto& [id, rec] : inbox.records) {
    (void)id;
    for (std::size_t p = 0; p < np; ++p) ctx.merged_q[p] |= rec.q[p];
  }

  ctx.peer_load.assign(np, 0);
  for (const PlanMessage& msg : inbox.plans) {
    for (const PlanEntry& e : msg.schedule) {
      ctx.peer_load[static_cast<std::size_t>(e.point)] += 1;
    }
  }

  ctx.guidance_target.reset();
  if (const auto target = guidance_target(agent, world.agent_count, state.pos, inbox,
                                          ctx.merged_q, *world.points)) {
    ctx.guidance_target = (*world.points)[static_cast<std::size_t>(*target)].p;
  }

  // obstacle and peer-safety regions that the horizon can actually touch
  const double reach = world.horizon * world.dyn.dt * world.vel_bound;
  const Aabb horizon_box{state.pos - Vec3{reach, reach, reach},
                         state.pos + Vec3{reach, reach, reach}};
  for (const ObstacleRegion& region : world.obstacles) {
    if (region.box.overlaps(horizon_box)) ctx.avoid.push_back(region);
  }
  for (const auto& [id, pos] : inbox.positions) {
    const Aabb peer_box{pos - Vec3{world.r_safe, world.r_safe, world.r_safe},
                        pos + Vec3{world.r_safe, world.r_safe, world.r_safe}};
    if (!peer_box.overlaps(horizon_box)) continue;
    ObstacleRegion region;
    region.poly = peer_safety_octahedron(pos, world.r_safe);
    region.box = peer_box;
    region.label = "peer_" + std::to_string(id);
    ctx.avoid.push_back(region);
  }

  prepare_context(ctx);
  return ctx;
}

PlanStepResult plan_step(int agent, const AgentState& state, const CoverageRecord& own,
                         const Inbox& inbox, const WorldModel& world, int t, int fallback_pose) {
  HorizonContext ctx = make_horizon_context(agent, state, own, inbox, world, t);
  BuiltModel built = build_agent_model(ctx);

  MilpSolution sol = solve_milp(built.model, world.solver);
  if (sol.status == MilpStatus::Infeasible || !sol.has_incumbent) {
    const std::string dump = world.debug_dir + "/debug_agent" + std::to_string(agent) + "_t" +
                             std::to_string(t) + ".mps";
    try {
      export_mps(built.model, dump);
    } catch (const std::exception&) {
      // the dump is best-effort
    }
    throw SolverFailure("agent " + std::to_string(agent) + " step " + std::to_string(t) +
                        (sol.status == MilpStatus::Infeasible
                             ? ": model infeasible (model dumped to "
                             : ": no incumbent within limits (model dumped to ") +
                        dump + ")");
  }

  PlanStepResult out;
  out.u.force = {sol.values[static_cast<std::size_t>(built.layout.u[0][0])],
                 sol.values[static_cast<std::size_t>(built.layout.u[0][1])],
                 sol.values[static_cast<std::size_t>(built.layout.u[0][2])]};

  out.m_active = fallback_pose;
  if (!built.layout.mu.empty()) {
    double best = -1.0;
    for (int m = 0; m < built.layout.poses; ++m) {
      const int var = built.layout.mu_var(1, m);
      const double v = sol.values[static_cast<std::size_t>(var)];
      if (v > best + 1e-9) {
        best = v;
        out.m_active = m;
      }
    }
  }

  out.message.agent = agent;
  out.message.t = t;
  out.message.age = PlanMessage::Age::Current;
  for (const auto& [key, cv] : built.layout.cand) {
    if (cv.xidot >= 0 && sol.values[static_cast<std::size_t>(cv.xidot)] > 0.5) {
      out.message.schedule.push_back(
          PlanEntry{std::get<2>(key), std::get<1>(key), std::get<0>(key)});
    }
  }
  std::sort(out.message.schedule.begin(), out.message.schedule.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return std::tie(a.point, a.pose, a.tau) < std::tie(b.point, b.pose, b.tau);
            });

  out.diag.candidates = static_cast<int>(ctx.candidates.size());
  out.diag.binaries = built.model.binary_count();
  out.diag.continuous = static_cast<int>(built.model.vars.size()) - out.diag.binaries;
  out.diag.rows = static_cast<int>(built.model.cons.size());
  out.diag.objective = sol.objective;
  out.diag.status = sol.status;
  out.diag.stats = sol.stats;
  return out;
}

}  // namespace covplan
