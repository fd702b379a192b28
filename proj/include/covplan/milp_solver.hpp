#pragma once

#include <stdexcept>

#include "covplan/milp_model.hpp"

namespace covplan {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  long iterations = 0;
};

/// Bounded-variable primal simplex on the continuous relaxation (binaries
/// relaxed to [0,1]). Dense two-phase tableau; Bland's rule engages after
/// 10 * (rows + cols) iterations.
LpSolution solve_lp(const MilpModel& model);
/// Same, with per-variable bound overrides (used for branch fixings).
LpSolution solve_lp_bounded(const MilpModel& model, const std::vector<double>& lo,
                            const std::vector<double>& hi);

struct SolverOptions {
  double gap_abs = 1e-6;        // absolute optimality gap
  long node_limit = 1'000'000;  // branch-and-bound node budget
  double time_limit = 60.0;     // seconds
  double int_tol = 1e-6;        // integrality tolerance
};

enum class MilpStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

struct SolveStats {
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  SolveStats stats;
  bool has_incumbent = false;
};

/// Best-first branch and bound over the binaries, with a depth-first dive for
/// the first incumbent. Branching picks the most fractional binary, ties by
/// lowest variable index. Deterministic for fixed inputs and options.
MilpSolution solve_milp(const MilpModel& model, const SolverOptions& opts = {});

struct TooManyBinaries : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration over all binary assignments (test oracle).
/// Throws TooManyBinaries above 20 free binaries.
MilpSolution brute_force_oracle(const MilpModel& model, const SolverOptions& opts = {});

/// Fixed-format MPS with ROWS/COLUMNS/RHS/BOUNDS sections and INTORG/INTEND
/// markers around binary runs. Row/column names are positional (R...., X....);
/// minimization sense.
void export_mps(const MilpModel& model, const std::string& path);
/// Reference reader for the subset written by export_mps.
MilpModel read_mps(const std::string& path);

}  // namespace covplan
