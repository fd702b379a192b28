#include "covplan/milp_builder.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace covplan {

namespace {

std::string vname(const char* base, int a, int b = -1, int c = -1, int d = -1) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%s_%d", base, a);
  if (b >= 0) n += std::snprintf(buf + n, sizeof(buf) - n, "_%d", b);
  if (c >= 0) n += std::snprintf(buf + n, sizeof(buf) - n, "_%d", c);
  if (d >= 0) n += std::snprintf(buf + n, sizeof(buf) - n, "_%d", d);
  return std::string(buf, static_cast<std::size_t>(n));
}

double max_dot(const Vec3& a, const Aabb& box) {
  double s = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double c = a[ax];
    s += c >= 0.0 ? c * box.hi[ax] : c * box.lo[ax];
  }
  return s;
}

double min_dot(const Vec3& a, const Aabb& box) {
  double s = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    const double c = a[ax];
    s += c >= 0.0 ? c * box.lo[ax] : c * box.hi[ax];
  }
  return s;
}

double face_big_m(const Plane& pl, const Aabb& env) {
  const double hi = max_dot(pl.normal, env);
  const double lo = min_dot(pl.normal, env);
  return std::max({hi - pl.offset, pl.offset - lo, hi - pl.offset - lo, 0.0});
}

}  // namespace

Aabb reach_box(const HorizonContext& ctx, int tau) {
  const double r = tau * ctx.dyn.dt * ctx.vel_bound;
  Aabb box{ctx.x0.pos - Vec3{r, r, r}, ctx.x0.pos + Vec3{r, r, r}};
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = std::max(box.lo[ax], ctx.env_min[ax]);
    const double hi = std::min(box.hi[ax], ctx.env_max[ax]);
    if (ax == 0) {
      box.lo.x = lo;
      box.hi.x = hi;
    } else if (ax == 1) {
      box.lo.y = lo;
      box.hi.y = hi;
    } else {
      box.lo.z = lo;
      box.hi.z = hi;
    }
  }
  return box;
}

BigMConfig compute_big_m(const Vec3& env_min, const Vec3& env_max, const CameraCatalog& catalog,
                         const std::vector<ObstacleRegion>& avoid, double margin) {
  const Aabb env{env_min, env_max};
  BigMConfig cfg;
  cfg.margin = margin;
  for (const CameraPose& pose : catalog.poses) {
    for (const Plane& pl : pose.faces) cfg.hull = std::max(cfg.hull, face_big_m(pl, env));
  }
  cfg.hull += 1.0;
  const Vec3 ext = env_max - env_min;
  cfg.cell = std::max({ext.x, ext.y, ext.z}) + 1.0;
  cfg.obstacle = 0.0;
  for (const ObstacleRegion& region : avoid) {
    for (const Plane& pl : region.poly.halfspaces) {
      cfg.obstacle = std::max(cfg.obstacle, face_big_m(pl, env) + margin);
    }
  }
  cfg.obstacle += 1.0;
  return cfg;
}

std::vector<std::vector<int>> reachable_cells(const HorizonContext& ctx) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(ctx.T));
  for (int tau = 1; tau <= ctx.T; ++tau) {
    const Aabb box = reach_box(ctx, tau);
    auto& cells = out[static_cast<std::size_t>(tau - 1)];
    for (int g = 0; g < ctx.grid->cell_count(); ++g) {
      if (ctx.grid->cell_box(g).overlaps(box)) cells.push_back(g);
    }
  }
  return out;
}

std::vector<Candidate> prune_candidates(const HorizonContext& ctx) {
  std::vector<Candidate> out;
  const PointsOfInterest& points = *ctx.points;
  const CameraIntrinsics& intr = ctx.catalog->intrinsics;
  const double half_diag = 0.5 * std::hypot(intr.base_len, intr.base_wid);
  const int np = static_cast<int>(points.size());

  for (int tau = 1; tau <= ctx.T; ++tau) {
    const double reach = tau * ctx.dyn.dt * ctx.vel_bound;
    const Aabb box = reach_box(ctx, tau);
    const auto& cells = ctx.reach_cells[static_cast<std::size_t>(tau - 1)];
    for (std::size_t m = 0; m < ctx.catalog->poses.size(); ++m) {
      const CameraPose& pose = ctx.catalog->poses[m];
      for (int p = 0; p < np; ++p) {
        if (ctx.merged_q[static_cast<std::size_t>(p)]) continue;
        if (ctx.peer_load[static_cast<std::size_t>(p)] > 0) continue;
        const Vec3& pt = points[static_cast<std::size_t>(p)].p;
        if (norm(pt - ctx.x0.pos) > reach + intr.range + half_diag) continue;
        bool visible = false;
        for (int g : cells) {
          if (ctx.vismap->visible(g, p)) {
            visible = true;
            break;
          }
        }
        if (!visible) continue;
        bool facable = true;
        for (const Plane& face : pose.faces) {
          // dot(a, pt) - beta0 - dot(a, x) <= 0 must be satisfiable in the box
          if (dot(face.normal, pt) - face.offset - max_dot(face.normal, box) > 0.0) {
            facable = false;
            break;
          }
        }
        if (!facable) continue;
        out.push_back(Candidate{tau, static_cast<int>(m), p});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.tau, a.pose, a.point) < std::tie(b.tau, b.pose, b.point);
  });
  return out;
}

void prepare_context(HorizonContext& ctx) {
  if (ctx.merged_q.empty()) ctx.merged_q.assign(ctx.points->size(), 0);
  if (ctx.peer_load.empty()) ctx.peer_load.assign(ctx.points->size(), 0);
  ctx.big_m = compute_big_m(ctx.env_min, ctx.env_max, *ctx.catalog, ctx.avoid, ctx.big_m.margin);
  ctx.reach_cells = reachable_cells(ctx);
  ctx.candidates = prune_candidates(ctx);
}

int VariableLayout::varpi_var(int tau, int cell) const {
  const auto& list = varpi[static_cast<std::size_t>(tau - 1)];
  for (const auto& [g, var] : list) {
    if (g == cell) return var;
  }
  return -1;
}

void add_dynamics_and_bounds(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx) {
  layout.T = ctx.T;
  layout.poses = static_cast<int>(ctx.catalog->poses.size());
  layout.x_pos.resize(static_cast<std::size_t>(ctx.T));
  layout.x_vel.resize(static_cast<std::size_t>(ctx.T));
  layout.u.resize(static_cast<std::size_t>(ctx.T));
  layout.varpi.resize(static_cast<std::size_t>(ctx.T));

  for (int tau = 1; tau <= ctx.T; ++tau) {
    for (int ax = 0; ax < 3; ++ax) {
      layout.x_pos[tau - 1][ax] =
          model.add_continuous(vname("xp", tau, ax), ctx.env_min[ax], ctx.env_max[ax], "x");
      layout.x_vel[tau - 1][ax] =
          model.add_continuous(vname("xv", tau, ax), -ctx.vel_bound, ctx.vel_bound, "x");
      layout.u[tau - 1][ax] =
          model.add_continuous(vname("u", tau, ax), -ctx.input_bound, ctx.input_bound, "u");
    }
  }

  const double k = 1.0 - ctx.dyn.drag;
  const double b = ctx.dyn.dt / ctx.dyn.mass;
  for (int tau = 1; tau <= ctx.T; ++tau) {
    for (int ax = 0; ax < 3; ++ax) {
      const int xp = layout.x_pos[tau - 1][ax];
      const int xv = layout.x_vel[tau - 1][ax];
      const int uu = layout.u[tau - 1][ax];
      if (tau == 1) {
        model.add_constraint({{xp, 1.0}}, Rel::Eq,
                             ctx.x0.pos[ax] + ctx.dyn.dt * ctx.x0.vel[ax], "dyn");
        model.add_constraint({{xv, 1.0}, {uu, -b}}, Rel::Eq, k * ctx.x0.vel[ax], "dyn");
      } else {
        const int xp0 = layout.x_pos[tau - 2][ax];
        const int xv0 = layout.x_vel[tau - 2][ax];
        model.add_constraint({{xp, 1.0}, {xp0, -1.0}, {xv0, -ctx.dyn.dt}}, Rel::Eq, 0.0, "dyn");
        model.add_constraint({{xv, 1.0}, {xv0, -k}, {uu, -b}}, Rel::Eq, 0.0, "dyn");
      }
    }
  }
}

void add_hull_membership(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx,
                         int tau, int pose, int point) {
  const CameraPose& cam = ctx.catalog->poses[static_cast<std::size_t>(pose)];
  const Vec3& pt = (*ctx.points)[static_cast<std::size_t>(point)].p;
  const double M = ctx.big_m.hull;

  CandidateVars& cv = layout.cand[{tau, pose, point}];
  cv.xi = model.add_binary(vname("xi", tau, pose, point), "xi");
  std::vector<LinTerm> sum_row{{cv.xi, 5.0}};
  for (int i = 0; i < 5; ++i) {
    cv.xit[i] = model.add_binary(vname("xit", tau, pose, point, i), "xit");
    const Plane& face = cam.faces[static_cast<std::size_t>(i)];
    // dot(a, p) - beta0 - dot(a, x_p) + M*xit <= M
    std::vector<LinTerm> row;
    for (int ax = 0; ax < 3; ++ax) {
      row.push_back({layout.x_pos[tau - 1][ax], -face.normal[ax]});
    }
    row.push_back({cv.xit[i], M});
    model.add_constraint(std::move(row), Rel::Le, M - dot(face.normal, pt) + face.offset,
                         "bigm_hull");
    sum_row.push_back({cv.xit[i], -1.0});
  }
  model.add_constraint(std::move(sum_row), Rel::Le, 0.0, "hull_and");
}

void add_camera_selection_and_conjunction(MilpModel& model, VariableLayout& layout,
                                          const HorizonContext& ctx) {
  if (ctx.candidates.empty()) return;

  const int poses = layout.poses;
  layout.mu.assign(static_cast<std::size_t>(ctx.T) * poses, -1);
  for (int tau = 1; tau <= ctx.T; ++tau) {
    std::vector<LinTerm> sum;
    for (int m = 0; m < poses; ++m) {
      const int var = model.add_binary(vname("mu", tau, m), "mu");
      layout.mu[static_cast<std::size_t>(tau - 1) * poses + m] = var;
      sum.push_back({var, 1.0});
    }
    model.add_constraint(std::move(sum), Rel::Eq, 1.0, "musum");
  }

  // cell indicators for every horizon step that carries a candidate
  std::vector<bool> active_tau(static_cast<std::size_t>(ctx.T) + 1, false);
  for (const Candidate& c : ctx.candidates) active_tau[static_cast<std::size_t>(c.tau)] = true;
  const double Mc = ctx.big_m.cell;
  for (int tau = 1; tau <= ctx.T; ++tau) {
    if (!active_tau[static_cast<std::size_t>(tau)]) continue;
    std::vector<LinTerm> sum;
    for (int g : ctx.reach_cells[static_cast<std::size_t>(tau - 1)]) {
      const int var = model.add_binary(vname("w", tau, g), "varpi");
      layout.varpi[static_cast<std::size_t>(tau - 1)].emplace_back(g, var);
      sum.push_back({var, 1.0});
      const Aabb box = ctx.grid->cell_box(g);
      for (int ax = 0; ax < 3; ++ax) {
        const int xp = layout.x_pos[tau - 1][ax];
        model.add_constraint({{xp, 1.0}, {var, Mc}}, Rel::Le, box.hi[ax] + Mc, "bigm_cell");
        model.add_constraint({{xp, -1.0}, {var, Mc}}, Rel::Le, -box.lo[ax] + Mc, "bigm_cell");
      }
    }
    model.add_constraint(std::move(sum), Rel::Eq, 1.0, "wsum");
  }

  // xibar = xi AND mu AND (visible-cell indicator)
  for (const Candidate& c : ctx.candidates) {
    CandidateVars& cv = layout.cand.at({c.tau, c.pose, c.point});
    cv.xibar = model.add_binary(vname("xib", c.tau, c.pose, c.point), "xibar");
    const int mu = layout.mu_var(c.tau, c.pose);
    std::vector<LinTerm> vis_cells;
    for (const auto& [g, var] : layout.varpi[static_cast<std::size_t>(c.tau - 1)]) {
      if (ctx.vismap->visible(g, c.point)) vis_cells.push_back({var, 1.0});
    }
    model.add_constraint({{cv.xibar, 1.0}, {cv.xi, -1.0}}, Rel::Le, 0.0, "conj");
    model.add_constraint({{cv.xibar, 1.0}, {mu, -1.0}}, Rel::Le, 0.0, "conj");
    std::vector<LinTerm> upper{{cv.xibar, 1.0}};
    for (const LinTerm& t : vis_cells) upper.push_back({t.var, -1.0});
    model.add_constraint(std::move(upper), Rel::Le, 0.0, "conj");
    std::vector<LinTerm> lower{{cv.xibar, 1.0}, {cv.xi, -1.0}, {mu, -1.0}};
    for (const LinTerm& t : vis_cells) lower.push_back({t.var, -1.0});
    model.add_constraint(std::move(lower), Rel::Ge, -2.0, "conj");
  }
}

void add_dedup_and_complementarity(MilpModel& model, VariableLayout& layout,
                                   const HorizonContext& ctx) {
  if (ctx.candidates.empty()) return;
  std::map<int, std::vector<int>> xidot_of_point;
  for (const Candidate& c : ctx.candidates) {
    CandidateVars& cv = layout.cand.at({c.tau, c.pose, c.point});
    cv.xihat = model.add_binary(vname("xih", c.tau, c.pose, c.point), "xihat");
    cv.xidot = model.add_binary(vname("xid", c.tau, c.pose, c.point), "xidot");
    const double q = ctx.merged_q[static_cast<std::size_t>(c.point)] ? 1.0 : 0.0;
    model.add_constraint({{cv.xihat, 1.0}, {cv.xibar, -1.0}}, Rel::Le, q, "dedup");
    model.add_constraint({{cv.xidot, 1.0}, {cv.xihat, -1.0}}, Rel::Le, 0.0, "dedup");
    xidot_of_point[c.point].push_back(cv.xidot);
  }
  for (const auto& [point, vars] : xidot_of_point) {
    const double cap =
        std::max(0.0, 1.0 - (ctx.merged_q[static_cast<std::size_t>(point)] ? 1.0 : 0.0) -
                          ctx.peer_load[static_cast<std::size_t>(point)]);
    std::vector<LinTerm> row;
    for (int v : vars) row.push_back({v, 1.0});
    model.add_constraint(std::move(row), Rel::Le, cap, "compl");
  }
}

void add_collision_avoidance(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx) {
  const double M = ctx.big_m.obstacle;
  const double delta = ctx.big_m.margin;
  for (std::size_t r = 0; r < ctx.avoid.size(); ++r) {
    const ConvexPolytope& poly = ctx.avoid[r].poly;
    const int nf = static_cast<int>(poly.halfspaces.size());
    for (int tau = 1; tau <= ctx.T; ++tau) {
      std::vector<LinTerm> card;
      for (int i = 0; i < nf; ++i) {
        const Plane& face = poly.halfspaces[static_cast<std::size_t>(i)];
        const int o = model.add_binary(vname("o", static_cast<int>(r), tau, i), "obs");
        std::vector<LinTerm> row{{o, M}};
        for (int ax = 0; ax < 3; ++ax) {
          row.push_back({layout.x_pos[tau - 1][ax], face.normal[ax]});
        }
        model.add_constraint(std::move(row), Rel::Ge, face.offset + delta, "bigm_obs");
        card.push_back({o, 1.0});
      }
      model.add_constraint(std::move(card), Rel::Le, nf - 1.0, "obs_card");
    }
  }
}

void set_objective(MilpModel& model, VariableLayout& layout, const HorizonContext& ctx) {
  if (ctx.guidance_target) {
    const Vec3& target = *ctx.guidance_target;
    for (int ax = 0; ax < 3; ++ax) {
      layout.e_pos[ax] = model.add_continuous(vname("egp", ax), 0.0,
                                              std::numeric_limits<double>::infinity(), "guid");
      layout.e_neg[ax] = model.add_continuous(vname("egn", ax), 0.0,
                                              std::numeric_limits<double>::infinity(), "guid");
      model.add_constraint(
          {{layout.x_pos[0][ax], 1.0}, {layout.e_pos[ax], -1.0}, {layout.e_neg[ax], 1.0}},
          Rel::Eq, target[ax], "guid");
      model.set_obj_coef(layout.e_pos[ax], ctx.eta);
      model.set_obj_coef(layout.e_neg[ax], ctx.eta);
    }
  }
  for (const auto& [key, cv] : layout.cand) {
    const int tau = std::get<0>(key);
    if (cv.xidot >= 0 && tau >= 2) model.set_obj_coef(cv.xidot, -1.0);
    if (cv.xibar >= 0 && tau == 1 && ctx.tie_break_weight > 0.0) {
      model.set_obj_coef(cv.xibar, -ctx.tie_break_weight);
    }
  }
}

BuiltModel build_agent_model(const HorizonContext& ctx) {
  if (ctx.T < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!ctx.catalog || !ctx.vismap || !ctx.grid || !ctx.points) {
    throw std::invalid_argument("horizon context is missing world data");
  }
  if (ctx.reach_cells.size() != static_cast<std::size_t>(ctx.T)) {
    throw std::invalid_argument("horizon context not prepared (reach_cells)");
  }

  BuiltModel built;
  built.model.name = vname("agent", ctx.agent_id, ctx.step);
  built.model.meta_agent = ctx.agent_id;
  built.model.meta_step = ctx.step;
  built.model.meta_horizon = ctx.T;

  add_dynamics_and_bounds(built.model, built.layout, ctx);
  for (const Candidate& c : ctx.candidates) {
    add_hull_membership(built.model, built.layout, ctx, c.tau, c.pose, c.point);
  }
  add_camera_selection_and_conjunction(built.model, built.layout, ctx);
  add_dedup_and_complementarity(built.model, built.layout, ctx);
  add_collision_avoidance(built.model, built.layout, ctx);
  set_objective(built.model, built.layout, ctx);
  return built;
}

ConvexPolytope peer_safety_octahedron(const Vec3& center, double r_safe) {
  ConvexPolytope poly;
  const double inv = 1.0 / std::sqrt(3.0);
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      for (int sz = -1; sz <= 1; sz += 2) {
        const Vec3 n{sx * inv, sy * inv, sz * inv};
        poly.halfspaces.push_back(Plane{n, dot(n, center) + r_safe * inv});
      }
    }
  }
  return poly;
}

}  // namespace covplan
