#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace covplan {

enum class VarKind { Continuous, Binary };
enum class Rel { Le, Eq, Ge };

struct LinTerm {
  int var;
  double coef;
};

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
  std::string tag;
};

struct MilpConstraint {
  std::vector<LinTerm> terms;
  Rel rel = Rel::Le;
  double rhs = 0.0;
  std::string tag;
};

/// Solver-agnostic mixed-integer model: registered variables, linear
/// constraints, and a minimization objective.
struct MilpModel {
  std::vector<MilpVariable> vars;
  std::vector<MilpConstraint> cons;
  std::vector<double> obj;  // dense, aligned with vars
  double obj_constant = 0.0;
  std::string name = "model";
  int meta_agent = -1;
  int meta_step = -1;
  int meta_horizon = 0;

  int add_continuous(const std::string& vname, double lo, double hi, const std::string& tag = "");
  int add_binary(const std::string& vname, const std::string& tag = "");
  void add_constraint(std::vector<LinTerm> terms, Rel rel, double rhs, const std::string& tag = "");
  void set_obj_coef(int var, double coef);
  void add_obj_coef(int var, double coef);

  int var_index(const std::string& vname) const;  // -1 when absent
  int binary_count() const;

  double eval_expr(const std::vector<LinTerm>& terms, const std::vector<double>& x) const;
  /// Signed violation of one constraint at x (positive means violated).
  double violation(const MilpConstraint& c, const std::vector<double>& x) const;
  /// Largest violation over all constraints and variable bounds; this is the
  /// independent check applied to solver outputs.
  double max_violation(const std::vector<double>& x) const;
  double eval_objective(const std::vector<double>& x) const;

 private:
  std::unordered_map<std::string, int> index_;
};

}  // namespace covplan
