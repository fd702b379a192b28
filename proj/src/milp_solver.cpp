#include "covplan/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace covplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;
constexpr double kPivTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr double kRatioTieTol = 1e-9;

enum class ColStatus : unsigned char { Basic, AtLo, AtHi, FreeZero };

// Dense two-phase primal simplex with bounded variables. Columns are the
// structural variables, one slack per row (a.x + s = b), and one artificial
// per row used only when the slack start point violates its bounds.
class Simplex {
 public:
  Simplex(const MilpModel& model, const std::vector<double>& lo_over,
          const std::vector<double>& hi_over)
      : model_(model) {
    n_ = static_cast<int>(model.vars.size());
    m_ = static_cast<int>(model.cons.size());
    ncols_ = n_ + 2 * m_;
    lo_.assign(ncols_, 0.0);
    hi_.assign(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lo_over[j];
      hi_[j] = hi_over[j];
    }
    tab_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    rhs_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const MilpConstraint& c = model.cons[i];
      for (const LinTerm& t : c.terms) at(i, t.var) += t.coef;
      at(i, n_ + i) = 1.0;
      rhs_[i] = c.rhs;
      switch (c.rel) {
        case Rel::Le:
          lo_[n_ + i] = 0.0;
          hi_[n_ + i] = kInf;
          break;
        case Rel::Ge:
          lo_[n_ + i] = -kInf;
          hi_[n_ + i] = 0.0;
          break;
        case Rel::Eq:
          lo_[n_ + i] = 0.0;
          hi_[n_ + i] = 0.0;
          break;
      }
      lo_[n_ + m_ + i] = 0.0;
      hi_[n_ + m_ + i] = 0.0;  // opened only when activated
    }
  }

  LpSolution run() {
    init_start_point();
    LpSolution out;

    if (need_phase1_) {
      std::vector<double> c1(ncols_, 0.0);
      for (int i = 0; i < m_; ++i) {
        if (art_active_[i]) c1[n_ + m_ + i] = 1.0;
      }
      const auto st = iterate(c1);
      if (st == IterResult::IterationLimit) throw std::runtime_error("simplex iteration limit");
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] >= n_ + m_) infeas += xb_[i];
      }
      if (infeas > kPhase1Tol) {
        out.status = LpStatus::Infeasible;
        out.iterations = iters_;
        return out;
      }
      for (int i = 0; i < m_; ++i) hi_[n_ + m_ + i] = 0.0;
    }

    std::vector<double> c2(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) c2[j] = model_.obj[j];
    const auto st = iterate(c2);
    if (st == IterResult::IterationLimit) throw std::runtime_error("simplex iteration limit");
    if (st == IterResult::Unbounded) {
      out.status = LpStatus::Unbounded;
      out.iterations = iters_;
      return out;
    }

    out.status = LpStatus::Optimal;
    out.values.assign(n_, 0.0);
    std::vector<double> full(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j) {
      if (stat_[j] != ColStatus::Basic) full[j] = val_[j];
    }
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    for (int j = 0; j < n_; ++j) {
      double v = full[j];
      if (std::isfinite(lo_[j]) && v < lo_[j] && lo_[j] - v <= 1e-6) v = lo_[j];
      if (std::isfinite(hi_[j]) && v > hi_[j] && v - hi_[j] <= 1e-6) v = hi_[j];
      out.values[j] = v;
    }
    out.objective = model_.eval_objective(out.values);
    out.iterations = iters_;
    return out;
  }

 private:
  enum class IterResult { Optimal, Unbounded, IterationLimit };

  double& at(int r, int c) { return tab_[static_cast<std::size_t>(r) * ncols_ + c]; }
  const double* row(int r) const { return tab_.data() + static_cast<std::size_t>(r) * ncols_; }

  void init_start_point() {
    stat_.assign(ncols_, ColStatus::AtLo);
    val_.assign(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      const bool fl = std::isfinite(lo_[j]), fh = std::isfinite(hi_[j]);
      if (fl && fh) {
        if (std::abs(lo_[j]) <= std::abs(hi_[j])) {
          stat_[j] = ColStatus::AtLo;
          val_[j] = lo_[j];
        } else {
          stat_[j] = ColStatus::AtHi;
          val_[j] = hi_[j];
        }
      } else if (fl) {
        stat_[j] = ColStatus::AtLo;
        val_[j] = lo_[j];
      } else if (fh) {
        stat_[j] = ColStatus::AtHi;
        val_[j] = hi_[j];
      } else {
        stat_[j] = ColStatus::FreeZero;
        val_[j] = 0.0;
      }
    }

    basis_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    art_active_.assign(m_, false);
    need_phase1_ = false;
    for (int i = 0; i < m_; ++i) {
      double r = rhs_[i];
      const double* tr = row(i);
      for (int j = 0; j < n_; ++j) {
        if (tr[j] != 0.0) r -= tr[j] * val_[j];
      }
      const int slack = n_ + i, art = n_ + m_ + i;
      if (r >= lo_[slack] && r <= hi_[slack]) {
        basis_[i] = slack;
        stat_[slack] = ColStatus::Basic;
        xb_[i] = r;
        val_[art] = 0.0;
        at(i, art) = 1.0;
      } else {
        const double clamped = std::min(std::max(r, lo_[slack]), hi_[slack]);
        stat_[slack] = (clamped == lo_[slack]) ? ColStatus::AtLo : ColStatus::AtHi;
        val_[slack] = clamped;
        const double resid = r - clamped;
        const double sigma = resid > 0.0 ? 1.0 : -1.0;
        at(i, art) = sigma;
        if (sigma < 0.0) {
          double* wr = tab_.data() + static_cast<std::size_t>(i) * ncols_;
          for (int j = 0; j < ncols_; ++j) wr[j] = -wr[j];
        }
        hi_[art] = kInf;
        art_active_[i] = true;
        basis_[i] = art;
        stat_[art] = ColStatus::Basic;
        xb_[i] = std::abs(resid);
        need_phase1_ = true;
      }
    }
  }

  void rebuild_z(const std::vector<double>& c) {
    z_.assign(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j) z_[j] = c[j];
    for (int i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* tr = row(i);
      for (int j = 0; j < ncols_; ++j) z_[j] -= cb * tr[j];
    }
    for (int i = 0; i < m_; ++i) z_[basis_[i]] = 0.0;
  }

  IterResult iterate(const std::vector<double>& c) {
    rebuild_z(c);
    const long bland_after = 10L * (m_ + ncols_);
    const long hard_cap = 400L * (m_ + ncols_) + 100000L;
    long local_iters = 0;

    while (true) {
      if (local_iters > hard_cap) return IterResult::IterationLimit;
      if (local_iters > 0 && local_iters % 256 == 0) rebuild_z(c);
      const bool bland = local_iters > bland_after;
      ++local_iters;
      ++iters_;

      // entering column
      int q = -1;
      double best = kCostTol;
      int dir = 0;
      for (int j = 0; j < ncols_; ++j) {
        if (stat_[j] == ColStatus::Basic) continue;
        if (lo_[j] == hi_[j]) continue;
        const double d = z_[j];
        int cand_dir = 0;
        if (stat_[j] == ColStatus::AtLo && d < -kCostTol) cand_dir = 1;
        else if (stat_[j] == ColStatus::AtHi && d > kCostTol) cand_dir = -1;
        else if (stat_[j] == ColStatus::FreeZero && std::abs(d) > kCostTol) cand_dir = d < 0 ? 1 : -1;
        if (cand_dir == 0) continue;
        if (bland) {
          q = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = cand_dir;
        }
      }
      if (q < 0) return IterResult::Optimal;

      // ratio test
      const double flip_len =
          (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
      double best_delta = kInf;
      int leave_row = -1;
      for (int i = 0; i < m_; ++i) {
        const double alpha = at(i, q);
        if (std::abs(alpha) <= kPivTol) continue;
        const double rate = -dir * alpha;  // d(xb_i)/d(step)
        const int bcol = basis_[i];
        double limit = kInf;
        if (rate < 0.0 && std::isfinite(lo_[bcol])) {
          limit = std::max(0.0, (xb_[i] - lo_[bcol]) / (-rate));
        } else if (rate > 0.0 && std::isfinite(hi_[bcol])) {
          limit = std::max(0.0, (hi_[bcol] - xb_[i]) / rate);
        }
        if (limit >= kInf) continue;
        if (limit < best_delta - kRatioTieTol) {
          best_delta = limit;
          leave_row = i;
        } else if (limit <= best_delta + kRatioTieTol && leave_row >= 0) {
          if (bland) {
            if (basis_[i] < basis_[leave_row]) leave_row = i;
          } else if (std::abs(alpha) > std::abs(at(leave_row, q))) {
            leave_row = i;
          }
        }
      }

      if (flip_len <= best_delta) {
        if (!std::isfinite(flip_len)) return IterResult::Unbounded;
        // bound flip, no basis change
        for (int i = 0; i < m_; ++i) {
          const double alpha = at(i, q);
          if (alpha != 0.0) xb_[i] += -dir * alpha * flip_len;
        }
        stat_[q] = (stat_[q] == ColStatus::AtLo) ? ColStatus::AtHi : ColStatus::AtLo;
        val_[q] = (stat_[q] == ColStatus::AtLo) ? lo_[q] : hi_[q];
        continue;
      }
      if (leave_row < 0) return IterResult::Unbounded;

      const double step = best_delta;
      const int lcol = basis_[leave_row];
      const double enter_val = val_[q] + dir * step;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        const double alpha = at(i, q);
        if (alpha != 0.0) xb_[i] += -dir * alpha * step;
      }
      // leaving column lands on the bound it ran into
      const double lrate = -dir * at(leave_row, q);
      if (lrate < 0.0) {
        stat_[lcol] = ColStatus::AtLo;
        val_[lcol] = lo_[lcol];
      } else {
        stat_[lcol] = ColStatus::AtHi;
        val_[lcol] = hi_[lcol];
      }

      // pivot
      double* pr = tab_.data() + static_cast<std::size_t>(leave_row) * ncols_;
      const double piv = pr[q];
      const double inv = 1.0 / piv;
      for (int j = 0; j < ncols_; ++j) pr[j] *= inv;
      pr[q] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double* wr = tab_.data() + static_cast<std::size_t>(i) * ncols_;
        const double f = wr[q];
        if (f == 0.0) continue;
        for (int j = 0; j < ncols_; ++j) wr[j] -= f * pr[j];
        wr[q] = 0.0;
      }
      {
        const double f = z_[q];
        if (f != 0.0) {
          for (int j = 0; j < ncols_; ++j) z_[j] -= f * pr[j];
          z_[q] = 0.0;
        }
      }
      basis_[leave_row] = q;
      stat_[q] = ColStatus::Basic;
      xb_[leave_row] = enter_val;
    }
  }

  const MilpModel& model_;
  int n_ = 0, m_ = 0, ncols_ = 0;
  std::vector<double> lo_, hi_, tab_, rhs_, z_, xb_, val_;
  std::vector<int> basis_;
  std::vector<ColStatus> stat_;
  std::vector<bool> art_active_;
  bool need_phase1_ = false;
  long iters_ = 0;
};

}  // namespace

LpSolution solve_lp_bounded(const MilpModel& model, const std::vector<double>& lo,
                            const std::vector<double>& hi) {
  Simplex s(model, lo, hi);
  return s.run();
}

LpSolution solve_lp(const MilpModel& model) {
  std::vector<double> lo(model.vars.size()), hi(model.vars.size());
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    lo[j] = model.vars[j].lo;
    hi[j] = model.vars[j].hi;
  }
  return solve_lp_bounded(model, lo, hi);
}

namespace {

struct BbNode {
  long id = 0;
  double bound = -kInf;
  int depth = 0;
  std::vector<std::pair<int, signed char>> fixings;
};

struct NodeOrder {
  bool operator()(const std::pair<double, long>& a, const std::pair<double, long>& b) const {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  }
};

int most_fractional_binary(const MilpModel& model, const std::vector<double>& x, double int_tol) {
  int pick = -1;
  double best = int_tol;
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    if (model.vars[j].kind != VarKind::Binary) continue;
    const double v = x[j];
    const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
    const double dist = std::min(std::abs(v), std::abs(v - 1.0));
    if (dist <= int_tol) continue;
    if (frac > best) {
      best = frac;
      pick = static_cast<int>(j);
    }
  }
  return pick;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  MilpSolution out;
  const int n = static_cast<int>(model.vars.size());
  std::vector<double> base_lo(n), base_hi(n);
  for (int j = 0; j < n; ++j) {
    base_lo[j] = model.vars[j].lo;
    base_hi[j] = model.vars[j].hi;
  }

  std::vector<BbNode> nodes;
  nodes.push_back(BbNode{});
  std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>, NodeOrder>
      open;

  double incumbent_obj = kInf;
  std::vector<double> incumbent;

  auto solve_node = [&](const BbNode& node) -> LpSolution {
    std::vector<double> lo = base_lo, hi = base_hi;
    for (const auto& [var, v] : node.fixings) {
      lo[var] = v;
      hi[var] = v;
    }
    LpSolution lp = solve_lp_bounded(model, lo, hi);
    ++out.stats.nodes;
    out.stats.lp_iterations += lp.iterations;
    return lp;
  };

  auto try_incumbent = [&](const LpSolution& lp) {
    if (model.max_violation(lp.values) > 1e-6) return;
    if (lp.objective < incumbent_obj - 1e-12) {
      incumbent_obj = lp.objective;
      incumbent = lp.values;
    }
  };

  // Dive for a first incumbent, then best-first on the LP bound.
  long next_id = 1;
  BbNode current = nodes[0];
  bool diving = true;
  bool root_infeasible = false;
  std::optional<MilpStatus> limit_hit;

  while (true) {
    if (out.stats.nodes >= opts.node_limit) {
      limit_hit = MilpStatus::NodeLimit;
      break;
    }
    if (elapsed() > opts.time_limit) {
      limit_hit = MilpStatus::TimeLimit;
      break;
    }

    LpSolution lp = solve_node(current);
    if (lp.status == LpStatus::Unbounded) {
      // A bounded-binary model can only be unbounded through its continuous
      // part; surface it as an error rather than guessing.
      throw std::runtime_error("milp relaxation unbounded");
    }
    if (lp.status == LpStatus::Optimal && lp.objective < incumbent_obj - opts.gap_abs) {
      const int frac = most_fractional_binary(model, lp.values, opts.int_tol);
      if (frac < 0) {
        try_incumbent(lp);
      } else {
        const double v = lp.values[frac];
        const signed char preferred = v >= 0.5 ? 1 : 0;
        BbNode pref;
        pref.id = next_id++;
        pref.bound = lp.objective;
        pref.depth = current.depth + 1;
        pref.fixings = current.fixings;
        pref.fixings.emplace_back(frac, preferred);
        BbNode other = pref;
        other.id = next_id++;
        other.fixings.back().second = static_cast<signed char>(1 - preferred);
        if (diving) {
          nodes.push_back(other);
          open.emplace(other.bound, static_cast<long>(nodes.size() - 1));
          current = pref;
          continue;
        }
        nodes.push_back(pref);
        open.emplace(pref.bound, static_cast<long>(nodes.size() - 1));
        nodes.push_back(other);
        open.emplace(other.bound, static_cast<long>(nodes.size() - 1));
      }
    } else if (current.depth == 0 && lp.status == LpStatus::Infeasible) {
      root_infeasible = true;
      break;
    }
    diving = diving && incumbent.empty();

    // next node
    bool found = false;
    while (!open.empty()) {
      const auto [bound, idx] = open.top();
      if (bound >= incumbent_obj - opts.gap_abs) {
        open = {};
        break;
      }
      open.pop();
      current = nodes[static_cast<std::size_t>(idx)];
      found = true;
      break;
    }
    if (!found) break;
  }

  out.stats.wall_time = elapsed();
  out.has_incumbent = !incumbent.empty();
  if (out.has_incumbent) {
    out.values = incumbent;
    out.objective = incumbent_obj;
    out.status = limit_hit.value_or(MilpStatus::Optimal);
  } else if (limit_hit) {
    out.status = *limit_hit;
  } else {
    out.status = MilpStatus::Infeasible;
    (void)root_infeasible;
  }
  return out;
}

MilpSolution brute_force_oracle(const MilpModel& model, const SolverOptions&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> free_bin;
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    if (model.vars[j].kind == VarKind::Binary && model.vars[j].lo < model.vars[j].hi) {
      free_bin.push_back(static_cast<int>(j));
    }
  }
  if (free_bin.size() > 20) {
    throw TooManyBinaries("brute_force_oracle supports at most 20 free binaries, got " +
                          std::to_string(free_bin.size()));
  }
  const int n = static_cast<int>(model.vars.size());
  std::vector<double> lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = model.vars[j].lo;
    hi[j] = model.vars[j].hi;
  }

  MilpSolution out;
  double best = kInf;
  const std::uint64_t total = 1ULL << free_bin.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t k = 0; k < free_bin.size(); ++k) {
      const double v = (mask >> k) & 1ULL ? 1.0 : 0.0;
      lo[free_bin[k]] = v;
      hi[free_bin[k]] = v;
    }
    LpSolution lp = solve_lp_bounded(model, lo, hi);
    ++out.stats.nodes;
    out.stats.lp_iterations += lp.iterations;
    if (lp.status != LpStatus::Optimal) continue;
    if (lp.objective < best - 1e-12) {
      best = lp.objective;
      out.values = lp.values;
      out.has_incumbent = true;
    }
  }
  out.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.has_incumbent) {
    out.status = MilpStatus::Optimal;
    out.objective = best;
  } else {
    out.status = MilpStatus::Infeasible;
  }
  return out;
}

// ---------------------------------------------------------------------------
// MPS export / reference reader
// ---------------------------------------------------------------------------

namespace {

std::string mps_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12G", v);
  if (std::string_view(buf).size() > 14) std::snprintf(buf, sizeof(buf), "%.8G", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string row_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "R%07d", i);
  return buf;
}

std::string col_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "X%07d", j);
  return buf;
}

}  // namespace

void export_mps(const MilpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  const int n = static_cast<int>(model.vars.size());
  const int m = static_cast<int>(model.cons.size());

  out << "NAME          " << model.name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int i = 0; i < m; ++i) {
    const char rel = model.cons[i].rel == Rel::Le ? 'L' : (model.cons[i].rel == Rel::Ge ? 'G' : 'E');
    out << " " << rel << "  " << row_name(i) << "\n";
  }

  // column-wise view
  std::vector<std::vector<std::pair<int, double>>> col_entries(n);
  for (int i = 0; i < m; ++i) {
    for (const LinTerm& t : model.cons[i].terms) {
      col_entries[t.var].emplace_back(i, t.coef);
    }
  }

  out << "COLUMNS\n";
  const std::string intorg =
      "    MARKER                 'MARKER'                 'INTORG'\n";
  const std::string intend =
      "    MARKER                 'MARKER'                 'INTEND'\n";
  bool in_int = false;
  for (int j = 0; j < n; ++j) {
    const bool is_int = model.vars[j].kind == VarKind::Binary;
    if (is_int && !in_int) {
      out << intorg;
      in_int = true;
    } else if (!is_int && in_int) {
      out << intend;
      in_int = false;
    }
    std::vector<std::pair<std::string, double>> entries;
    if (model.obj[j] != 0.0) entries.emplace_back("COST", model.obj[j]);
    for (const auto& [r, coef] : col_entries[j]) entries.emplace_back(row_name(r), coef);
    if (entries.empty()) entries.emplace_back("COST", 0.0);  // keep the column declared
    for (std::size_t k = 0; k < entries.size(); k += 2) {
      std::string line = "    " + pad(col_name(j), 10) + pad(entries[k].first, 10) +
                         pad(mps_value(entries[k].second), 15);
      if (k + 1 < entries.size()) {
        line += pad(entries[k + 1].first, 10) + mps_value(entries[k + 1].second);
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << "\n";
    }
  }
  if (in_int) out << intend;

  out << "RHS\n";
  for (int i = 0; i < m; ++i) {
    if (model.cons[i].rhs == 0.0) continue;
    out << "    " << pad("RHS", 10) << pad(row_name(i), 10) << mps_value(model.cons[i].rhs)
        << "\n";
  }
  if (model.obj_constant != 0.0) {
    out << "    " << pad("RHS", 10) << pad("COST", 10) << mps_value(-model.obj_constant) << "\n";
  }

  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const MilpVariable& v = model.vars[j];
    if (v.lo == v.hi) {
      out << " FX " << pad("BND", 10) << pad(col_name(j), 10) << mps_value(v.lo) << "\n";
      continue;
    }
    if (std::isfinite(v.lo)) {
      out << " LO " << pad("BND", 10) << pad(col_name(j), 10) << mps_value(v.lo) << "\n";
    } else {
      out << " MI " << pad("BND", 10) << col_name(j) << "\n";
    }
    if (std::isfinite(v.hi)) {
      out << " UP " << pad("BND", 10) << pad(col_name(j), 10) << mps_value(v.hi) << "\n";
    } else {
      out << " PL " << pad("BND", 10) << col_name(j) << "\n";
    }
  }
  out << "ENDATA\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

MilpModel read_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  MilpModel model;
  model.name = "mps";
  std::string line, section;
  std::vector<std::pair<std::string, Rel>> rows;  // order as declared, excluding objective
  std::string obj_row;
  std::unordered_map<std::string, int> row_of;
  bool in_int = false;

  auto tokens = [](const std::string& s) {
    std::vector<std::string> toks;
    std::istringstream ss(s);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
  };

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const auto toks = tokens(line);
      section = toks.empty() ? "" : toks[0];
      if (section == "NAME" && toks.size() > 1) model.name = toks[1];
      if (section == "ENDATA") break;
      continue;
    }
    const auto toks = tokens(line);
    if (toks.empty()) continue;

    if (section == "ROWS") {
      if (toks.size() < 2) throw std::runtime_error("mps: bad ROWS line");
      if (toks[0] == "N") {
        if (obj_row.empty()) obj_row = toks[1];
      } else {
        const Rel rel = toks[0] == "L" ? Rel::Le : (toks[0] == "G" ? Rel::Ge : Rel::Eq);
        row_of[toks[1]] = static_cast<int>(rows.size());
        rows.emplace_back(toks[1], rel);
        model.cons.push_back(MilpConstraint{{}, rel, 0.0, ""});
      }
    } else if (section == "COLUMNS") {
      if (toks.size() >= 3 && toks[1] == "'MARKER'") {
        in_int = toks[2] == "'INTORG'";
        continue;
      }
      int var = model.var_index(toks[0]);
      if (var < 0) {
        var = in_int ? model.add_binary(toks[0]) : model.add_continuous(toks[0], 0.0, kInf);
      }
      for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
        const double coef = std::stod(toks[k + 1]);
        if (toks[k] == obj_row) {
          model.add_obj_coef(var, coef);
        } else {
          const auto it = row_of.find(toks[k]);
          if (it == row_of.end()) throw std::runtime_error("mps: unknown row " + toks[k]);
          model.cons[static_cast<std::size_t>(it->second)].terms.push_back(LinTerm{var, coef});
        }
      }
    } else if (section == "RHS") {
      for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
        const double v = std::stod(toks[k + 1]);
        if (toks[k] == obj_row) {
          model.obj_constant = -v;
        } else {
          const auto it = row_of.find(toks[k]);
          if (it == row_of.end()) throw std::runtime_error("mps: unknown rhs row " + toks[k]);
          model.cons[static_cast<std::size_t>(it->second)].rhs = v;
        }
      }
    } else if (section == "BOUNDS") {
      if (toks.size() < 3) throw std::runtime_error("mps: bad BOUNDS line");
      const std::string& kind = toks[0];
      const int var = model.var_index(toks[2]);
      if (var < 0) throw std::runtime_error("mps: bound on unknown column " + toks[2]);
      MilpVariable& v = model.vars[static_cast<std::size_t>(var)];
      const double val = toks.size() > 3 ? std::stod(toks[3]) : 0.0;
      if (kind == "UP") v.hi = val;
      else if (kind == "LO") v.lo = val;
      else if (kind == "FX") v.lo = v.hi = val;
      else if (kind == "MI") v.lo = -kInf;
      else if (kind == "PL") v.hi = kInf;
      else if (kind == "FR") { v.lo = -kInf; v.hi = kInf; }
      else if (kind == "BV") { v.lo = 0.0; v.hi = 1.0; v.kind = VarKind::Binary; }
      else throw std::runtime_error("mps: unsupported bound kind " + kind);
    }
  }
  return model;
}

}  // namespace covplan
