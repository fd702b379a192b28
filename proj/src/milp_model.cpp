#include "covplan/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covplan {

int MilpModel::add_continuous(const std::string& vname, double lo, double hi,
                              const std::string& tag) {
  if (lo > hi) throw std::invalid_argument("variable " + vname + " has lo > hi");
  if (index_.count(vname)) throw std::invalid_argument("duplicate variable name " + vname);
  const int id = static_cast<int>(vars.size());
  vars.push_back(MilpVariable{vname, VarKind::Continuous, lo, hi, tag});
  obj.push_back(0.0);
  index_.emplace(vname, id);
  return id;
}

int MilpModel::add_binary(const std::string& vname, const std::string& tag) {
  if (index_.count(vname)) throw std::invalid_argument("duplicate variable name " + vname);
  const int id = static_cast<int>(vars.size());
  vars.push_back(MilpVariable{vname, VarKind::Binary, 0.0, 1.0, tag});
  obj.push_back(0.0);
  index_.emplace(vname, id);
  return id;
}

void MilpModel::add_constraint(std::vector<LinTerm> terms, Rel rel, double rhs,
                               const std::string& tag) {
  for (const LinTerm& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars.size())) {
      throw std::invalid_argument("constraint references unregistered variable");
    }
  }
  cons.push_back(MilpConstraint{std::move(terms), rel, rhs, tag});
}

void MilpModel::set_obj_coef(int var, double coef) { obj.at(static_cast<std::size_t>(var)) = coef; }

void MilpModel::add_obj_coef(int var, double coef) {
  obj.at(static_cast<std::size_t>(var)) += coef;
}

int MilpModel::var_index(const std::string& vname) const {
  const auto it = index_.find(vname);
  return it == index_.end() ? -1 : it->second;
}

int MilpModel::binary_count() const {
  return static_cast<int>(
      std::count_if(vars.begin(), vars.end(),
                    [](const MilpVariable& v) { return v.kind == VarKind::Binary; }));
}

double MilpModel::eval_expr(const std::vector<LinTerm>& terms, const std::vector<double>& x) const {
  double s = 0.0;
  for (const LinTerm& t : terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

double MilpModel::violation(const MilpConstraint& c, const std::vector<double>& x) const {
  const double lhs = eval_expr(c.terms, x);
  switch (c.rel) {
    case Rel::Le:
      return lhs - c.rhs;
    case Rel::Ge:
      return c.rhs - lhs;
    case Rel::Eq:
      return std::abs(lhs - c.rhs);
  }
  return 0.0;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const MilpConstraint& c : cons) worst = std::max(worst, violation(c, x));
  for (std::size_t j = 0; j < vars.size(); ++j) {
    worst = std::max(worst, vars[j].lo - x[j]);
    worst = std::max(worst, x[j] - vars[j].hi);
  }
  return worst;
}

double MilpModel::eval_objective(const std::vector<double>& x) const {
  double s = obj_constant;
  for (std::size_t j = 0; j < vars.size(); ++j) s += obj[j] * x[j];
  return s;
}

}  // namespace covplan
