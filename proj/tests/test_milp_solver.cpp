#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "covplan/milp_solver.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace covplan;
using covplan::testing::uniform;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Test-only LP oracle: enumerate candidate vertices as intersections of n
// hyperplanes taken from the constraint rows (as equalities) and the finite
// variable bounds, keep the feasible ones, and return the best objective.
// Valid for bounded instances, which is all the generator produces.
struct OracleLp {
  bool feasible = false;
  double objective = 0.0;
};

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[size_t(r)][size_t(col)]) > std::abs(a[size_t(piv)][size_t(col)])) piv = r;
    }
    if (std::abs(a[size_t(piv)][size_t(col)]) < 1e-10) return false;
    std::swap(a[size_t(piv)], a[size_t(col)]);
    std::swap(b[size_t(piv)], b[size_t(col)]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[size_t(r)][size_t(col)] / a[size_t(col)][size_t(col)];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[size_t(r)][size_t(c)] -= f * a[size_t(col)][size_t(c)];
      b[size_t(r)] -= f * b[size_t(col)];
    }
  }
  x.assign(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) x[size_t(i)] = b[size_t(i)] / a[size_t(i)][size_t(i)];
  return true;
}

OracleLp lp_vertex_oracle(const MilpModel& model) {
  const int n = static_cast<int>(model.vars.size());
  struct Hyper {
    std::vector<double> a;
    double b;
  };
  std::vector<Hyper> planes;
  for (const MilpConstraint& c : model.cons) {
    Hyper h{std::vector<double>(size_t(n), 0.0), c.rhs};
    for (const LinTerm& t : c.terms) h.a[size_t(t.var)] += t.coef;
    planes.push_back(std::move(h));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(model.vars[size_t(j)].lo)) {
      Hyper h{std::vector<double>(size_t(n), 0.0), model.vars[size_t(j)].lo};
      h.a[size_t(j)] = 1.0;
      planes.push_back(std::move(h));
    }
    if (std::isfinite(model.vars[size_t(j)].hi) &&
        model.vars[size_t(j)].hi != model.vars[size_t(j)].lo) {
      Hyper h{std::vector<double>(size_t(n), 0.0), model.vars[size_t(j)].hi};
      h.a[size_t(j)] = 1.0;
      planes.push_back(std::move(h));
    }
  }

  OracleLp out;
  std::vector<int> pick(size_t(n), 0);
  const int H = static_cast<int>(planes.size());
  std::vector<int> idx;
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (int i : idx) {
        a.push_back(planes[size_t(i)].a);
        b.push_back(planes[size_t(i)].b);
      }
      std::vector<double> x;
      if (!solve_square(a, b, x)) return;
      for (int j = 0; j < n; ++j) {
        if (x[size_t(j)] < model.vars[size_t(j)].lo - 1e-7) return;
        if (x[size_t(j)] > model.vars[size_t(j)].hi + 1e-7) return;
      }
      if (model.max_violation(x) > 1e-7) return;
      const double obj = model.eval_objective(x);
      if (!out.feasible || obj < out.objective) {
        out.feasible = true;
        out.objective = obj;
      }
      return;
    }
    for (int i = start; i < H; ++i) {
      idx.push_back(i);
      rec(i + 1, depth + 1);
      idx.pop_back();
    }
  };
  rec(0, 0);
  (void)pick;
  return out;
}

MilpModel random_lp(std::mt19937_64& rng, int nvars, int nrows) {
  MilpModel m;
  for (int j = 0; j < nvars; ++j) {
    const double lo = uniform(rng, -4, 0);
    const double hi = lo + uniform(rng, 1, 6);
    m.add_continuous("x" + std::to_string(j), lo, hi);
    m.set_obj_coef(j, uniform(rng, -2, 2));
  }
  std::vector<double> center(static_cast<std::size_t>(nvars), 0.0);
  for (int j = 0; j < nvars; ++j) {
    center[size_t(j)] = uniform(rng, m.vars[size_t(j)].lo, m.vars[size_t(j)].hi);
  }
  for (int i = 0; i < nrows; ++i) {
    std::vector<LinTerm> terms;
    double at_center = 0.0;
    for (int j = 0; j < nvars; ++j) {
      if (uniform(rng, 0, 1) < 0.35) continue;
      const double coef = uniform(rng, -3, 3);
      terms.push_back({j, coef});
      at_center += coef * center[size_t(j)];
    }
    if (terms.empty()) continue;
    const double slack = uniform(rng, -1.0, 2.5);
    const double roll = uniform(rng, 0, 1);
    if (roll < 0.45) {
      m.add_constraint(std::move(terms), Rel::Le, at_center + slack);
    } else if (roll < 0.9) {
      m.add_constraint(std::move(terms), Rel::Ge, at_center - slack);
    } else {
      m.add_constraint(std::move(terms), Rel::Eq, at_center);
    }
  }
  return m;
}

MilpModel random_milp(std::mt19937_64& rng, int nbin, int ncont, int nrows) {
  MilpModel m;
  for (int j = 0; j < nbin; ++j) m.add_binary("b" + std::to_string(j));
  for (int j = 0; j < ncont; ++j) {
    const double lo = uniform(rng, -5, 0);
    m.add_continuous("x" + std::to_string(j), lo, lo + uniform(rng, 1, 8));
  }
  const int n = nbin + ncont;
  for (int j = 0; j < n; ++j) m.set_obj_coef(j, uniform(rng, -2, 2));
  std::vector<double> center(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    center[size_t(j)] = uniform(rng, m.vars[size_t(j)].lo, m.vars[size_t(j)].hi);
  }
  for (int i = 0; i < nrows; ++i) {
    std::vector<LinTerm> terms;
    double at_center = 0.0;
    for (int j = 0; j < n; ++j) {
      if (uniform(rng, 0, 1) < 0.5) continue;
      const double coef = uniform(rng, -3, 3);
      terms.push_back({j, coef});
      at_center += coef * center[size_t(j)];
    }
    if (terms.empty()) continue;
    const double slack = uniform(rng, -0.9, 1.8);
    if (uniform(rng, 0, 1) < 0.5) {
      m.add_constraint(std::move(terms), Rel::Le, at_center + slack);
    } else {
      m.add_constraint(std::move(terms), Rel::Ge, at_center - slack);
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("milp_solver") {
  TEST_CASE("lp worked examples") {
    SUBCASE("max x+y under unit caps") {
      MilpModel m;
      m.add_continuous("x", 0, kInf);
      m.add_continuous("y", 0, kInf);
      m.set_obj_coef(0, -1);
      m.set_obj_coef(1, -1);
      m.add_constraint({{0, 1.0}}, Rel::Le, 1.0);
      m.add_constraint({{1, 1.0}}, Rel::Le, 1.0);
      const LpSolution s = solve_lp(m);
      REQUIRE(s.status == LpStatus::Optimal);
      CHECK(s.objective == doctest::Approx(-2.0).epsilon(1e-9));
      CHECK(s.values[0] == doctest::Approx(1.0));
      CHECK(s.values[1] == doctest::Approx(1.0));
    }
    SUBCASE("contradictory rows") {
      MilpModel m;
      m.add_continuous("x", -10, 10);
      m.add_constraint({{0, 1.0}}, Rel::Le, 0.0);
      m.add_constraint({{0, 1.0}}, Rel::Ge, 1.0);
      CHECK(solve_lp(m).status == LpStatus::Infeasible);
    }
    SUBCASE("unbounded ray") {
      MilpModel m;
      m.add_continuous("x", 0, kInf);
      m.set_obj_coef(0, -1.0);
      CHECK(solve_lp(m).status == LpStatus::Unbounded);
    }
    SUBCASE("equality row") {
      MilpModel m;
      m.add_continuous("x", -5, 5);
      m.add_continuous("y", -5, 5);
      m.set_obj_coef(0, 1.0);
      m.add_constraint({{0, 1.0}, {1, 1.0}}, Rel::Eq, 3.0);
      const LpSolution s = solve_lp(m);
      REQUIRE(s.status == LpStatus::Optimal);
      CHECK(s.values[0] == doctest::Approx(-2.0));
      CHECK(s.values[1] == doctest::Approx(5.0));
    }
  }

  TEST_CASE("random dense LPs match the vertex enumeration oracle") {
    std::mt19937_64 rng(41);
    int solved = 0;
    for (int k = 0; k < 50; ++k) {
      const int nvars = 3 + int(k % 4);  // 3..6
      const int nrows = 2 + int(uniform(rng, 0, 4.99));
      const MilpModel m = random_lp(rng, nvars, nrows);
      const OracleLp want = lp_vertex_oracle(m);
      const LpSolution got = solve_lp(m);
      if (want.feasible) {
        REQUIRE_MESSAGE(got.status == LpStatus::Optimal, "instance ", k);
        CHECK_MESSAGE(std::abs(got.objective - want.objective) <= 1e-7, "instance ", k,
                      " got ", got.objective, " want ", want.objective);
        CHECK(m.max_violation(got.values) <= 1e-7);
        ++solved;
      } else {
        CHECK_MESSAGE(got.status == LpStatus::Infeasible, "instance ", k);
      }
    }
    CHECK(solved >= 20);
  }

  TEST_CASE("degenerate duplicated rows still terminate") {
    MilpModel m;
    m.add_continuous("x", 0, 10);
    m.add_continuous("y", 0, 10);
    m.set_obj_coef(0, -1);
    m.set_obj_coef(1, -2);
    for (int i = 0; i < 6; ++i) m.add_constraint({{0, 1.0}, {1, 1.0}}, Rel::Le, 4.0);
    for (int i = 0; i < 4; ++i) m.add_constraint({{0, 1.0}, {1, -1.0}}, Rel::Le, 0.0);
    const LpSolution s = solve_lp(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-6.0));  // x=y=2
  }

  TEST_CASE("milp worked examples") {
    SUBCASE("tiny knapsack") {
      MilpModel m;
      m.add_binary("a");
      m.add_binary("b");
      m.set_obj_coef(0, -3);
      m.set_obj_coef(1, -2);
      m.add_constraint({{0, 1.0}, {1, 1.0}}, Rel::Le, 1.0);
      const MilpSolution s = solve_milp(m);
      REQUIRE(s.status == MilpStatus::Optimal);
      CHECK(s.objective == doctest::Approx(-3.0));
      CHECK(s.values[0] == doctest::Approx(1.0));
      CHECK(s.values[1] == doctest::Approx(0.0));
    }
    SUBCASE("all binaries fixed by bounds reduces to one LP") {
      MilpModel m;
      m.add_binary("a");
      m.add_binary("b");
      m.vars[0].lo = m.vars[0].hi = 1.0;
      m.vars[1].lo = m.vars[1].hi = 0.0;
      m.add_continuous("x", 0, 5);
      m.set_obj_coef(2, 1.0);
      m.add_constraint({{0, 1.0}, {2, 1.0}}, Rel::Ge, 3.0);
      const MilpSolution s = solve_milp(m);
      REQUIRE(s.status == MilpStatus::Optimal);
      CHECK(s.stats.nodes == 1);
      CHECK(s.objective == doctest::Approx(2.0));
    }
    SUBCASE("infeasible binary model") {
      MilpModel m;
      m.add_binary("a");
      m.add_constraint({{0, 1.0}}, Rel::Ge, 0.75);
      m.add_constraint({{0, 1.0}}, Rel::Le, 0.25);
      CHECK(solve_milp(m).status == MilpStatus::Infeasible);
    }
  }

  TEST_CASE("brute force oracle basics") {
    SUBCASE("zero binaries is a single LP") {
      MilpModel m;
      m.add_continuous("x", 0, 2);
      m.set_obj_coef(0, 1.0);
      const MilpSolution s = brute_force_oracle(m);
      REQUIRE(s.status == MilpStatus::Optimal);
      CHECK(s.stats.nodes == 1);
      CHECK(s.objective == doctest::Approx(0.0));
    }
    SUBCASE("binary cap") {
      MilpModel m;
      for (int j = 0; j < 21; ++j) m.add_binary("b" + std::to_string(j));
      CHECK_THROWS_AS(brute_force_oracle(m), TooManyBinaries);
    }
  }

  TEST_CASE("random mixed instances match the brute force oracle") {
    std::mt19937_64 rng(42);
    int feasible = 0, infeasible = 0;
    for (int k = 0; k < 100; ++k) {
      const int nbin = 3 + int(uniform(rng, 0, 9.99));   // 3..12
      const int ncont = 2 + int(uniform(rng, 0, 6.99));  // 2..8
      const int nrows = 4 + int(uniform(rng, 0, 8.99));
      const MilpModel m = random_milp(rng, nbin, ncont, nrows);
      const MilpSolution want = brute_force_oracle(m);
      const MilpSolution got = solve_milp(m);
      if (want.status == MilpStatus::Optimal) {
        REQUIRE_MESSAGE(got.status == MilpStatus::Optimal, "instance ", k);
        CHECK_MESSAGE(std::abs(got.objective - want.objective) <= 1e-6, "instance ", k,
                      " got ", got.objective, " want ", want.objective);
        CHECK(m.max_violation(got.values) <= 1e-6);
        for (int j = 0; j < nbin; ++j) {
          const double v = got.values[size_t(j)];
          CHECK(std::min(std::abs(v), std::abs(v - 1.0)) <= 1e-6);
        }
        ++feasible;
      } else {
        CHECK_MESSAGE(got.status == MilpStatus::Infeasible, "instance ", k);
        ++infeasible;
      }
    }
    CHECK(feasible >= 30);
    CHECK(infeasible >= 3);
  }

  TEST_CASE("solver determinism") {
    std::mt19937_64 rng(43);
    const MilpModel m = random_milp(rng, 8, 5, 8);
    const MilpSolution a = solve_milp(m);
    const MilpSolution b = solve_milp(m);
    CHECK(a.status == b.status);
    if (a.has_incumbent) {
      CHECK(a.objective == b.objective);
      CHECK(a.values == b.values);
      CHECK(a.stats.nodes == b.stats.nodes);
      CHECK(a.stats.lp_iterations == b.stats.lp_iterations);
    }
  }

  TEST_CASE("mps export and re-import") {
    MilpModel m;
    m.name = "knap";
    m.add_binary("a");
    m.add_binary("b");
    m.add_continuous("x", -1.5, 2.5);
    m.add_continuous("free", -kInf, kInf);
    m.set_obj_coef(0, -3);
    m.set_obj_coef(1, -2);
    m.set_obj_coef(2, 0.25);
    m.add_constraint({{0, 1.0}, {1, 1.0}}, Rel::Le, 1.0);
    m.add_constraint({{2, 2.0}, {3, 1.0}}, Rel::Ge, -4.0);
    m.add_constraint({{0, 1.0}, {2, -1.0}, {3, 1.0}}, Rel::Eq, 0.5);

    const std::string path =
        (std::filesystem::temp_directory_path() / "covplan_test.mps").string();
    export_mps(m, path);
    const MilpModel back = read_mps(path);

    REQUIRE(back.vars.size() == m.vars.size());
    REQUIRE(back.cons.size() == m.cons.size());
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
      CHECK(back.vars[j].kind == m.vars[j].kind);
      CHECK((back.vars[j].lo == m.vars[j].lo ||
             std::abs(back.vars[j].lo - m.vars[j].lo) <= 1e-9));
      CHECK((back.vars[j].hi == m.vars[j].hi ||
             std::abs(back.vars[j].hi - m.vars[j].hi) <= 1e-9));
      CHECK(back.obj[j] == doctest::Approx(m.obj[j]));
    }
    for (std::size_t i = 0; i < m.cons.size(); ++i) {
      CHECK(back.cons[i].rel == m.cons[i].rel);
      CHECK(back.cons[i].rhs == doctest::Approx(m.cons[i].rhs));
      REQUIRE(back.cons[i].terms.size() == m.cons[i].terms.size());
      for (std::size_t t = 0; t < m.cons[i].terms.size(); ++t) {
        CHECK(back.cons[i].terms[t].var == m.cons[i].terms[t].var);
        CHECK(back.cons[i].terms[t].coef == doctest::Approx(m.cons[i].terms[t].coef));
      }
    }
    const MilpSolution s1 = solve_milp(m);
    const MilpSolution s2 = solve_milp(back);
    REQUIRE(s1.status == MilpStatus::Optimal);
    REQUIRE(s2.status == MilpStatus::Optimal);
    CHECK(std::abs(s1.objective - s2.objective) <= 1e-9);

    // marker sections appear exactly when binaries exist
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("'INTORG'") != std::string::npos);
    CHECK(text.find("'INTEND'") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("mps of a pure-continuous and an empty model") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "covplan_test2.mps").string();
    {
      MilpModel m;
      m.add_continuous("x", 0, 1);
      export_mps(m, path);
      std::ifstream in(path);
      const std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
      CHECK(text.find("'INTORG'") == std::string::npos);
    }
    {
      MilpModel empty;
      export_mps(empty, path);
      const MilpModel back = read_mps(path);
      CHECK(back.vars.empty());
      CHECK(back.cons.empty());
    }
    std::filesystem::remove(path);
  }
}
