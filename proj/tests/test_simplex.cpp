// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/simplex.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "scengen/milp.hpp"
#include "scengen/model.hpp"
#include "test_util.hpp"

using namespace scengen;
using scengen_test::enumerate_vertices;
using scengen_test::random_boxed_lp;

namespace {

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Weak/strong duality certificate from the returned point and row duals.
// Converts everything to minimization, rebuilds reduced costs d = c - y'A,
// checks dual sign conventions per relation, and compares the bound-adjusted
// dual objective y'b + sum_j d_j * (active bound) to the primal objective.
void check_lp_certificate(const Model& m, const Solution& sol, double tol) {
  REQUIRE(sol.status == SolveStatus::kOptimal);
  REQUIRE(static_cast<int>(sol.row_duals.size()) == m.num_rows());
  const double sgn = m.sense() == ObjSense::kMaximize ? -1.0 : 1.0;

  std::vector<double> d(m.num_vars());
  for (int j = 0; j < m.num_vars(); ++j) d[j] = sgn * m.objective_coef(j);
  double dual_obj = 0.0;
  for (int i = 0; i < m.num_rows(); ++i) {
    const double y = sgn * sol.row_duals[i];
    switch (m.row(i).rel) {
      case Relation::kLessEqual:
        CHECK(y <= tol);
        break;
      case Relation::kGreaterEqual:
        CHECK(y >= -tol);
        break;
      case Relation::kEqual:
        break;
    }
    for (const auto& t : m.row(i).terms) d[t.var] -= y * t.coef;
    dual_obj += y * m.row(i).rhs;
  }
  for (int j = 0; j < m.num_vars(); ++j) {
    if (d[j] > tol) {
      REQUIRE(std::isfinite(m.var(j).lower));
      dual_obj += d[j] * m.var(j).lower;
    } else if (d[j] < -tol) {
      REQUIRE(std::isfinite(m.var(j).upper));
      dual_obj += d[j] * m.var(j).upper;
    }
  }
  CHECK_MESSAGE(near(dual_obj, sgn * sol.objective, 1e-6),
                "dual " << dual_obj << " vs primal " << sgn * sol.objective);
}

}  // namespace

TEST_CASE("production lp with known optimum and duals") {
  Model m;
  m.add_continuous("x", 0.0, kInfinity);
  m.add_continuous("y", 0.0, kInfinity);
  m.set_objective_coef(0, 3.0);
  m.set_objective_coef(1, 5.0);
  m.set_sense(ObjSense::kMaximize);
  m.add_row("r0", {{0, 1.0}}, Relation::kLessEqual, 4.0);
  m.add_row("r1", {{1, 2.0}}, Relation::kLessEqual, 12.0);
  m.add_row("r2", {{0, 3.0}, {1, 2.0}}, Relation::kLessEqual, 18.0);

  Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(36.0));
  CHECK(s.values[0] == doctest::Approx(2.0));
  CHECK(s.values[1] == doctest::Approx(6.0));
  // Marginal value of each resource, in the model's own (maximize) sense.
  CHECK(s.row_duals[0] == doctest::Approx(0.0));
  CHECK(s.row_duals[1] == doctest::Approx(1.5));
  CHECK(s.row_duals[2] == doctest::Approx(1.0));
  check_lp_certificate(m, s, 1e-7);
}

TEST_CASE("equality rows pin the solution") {
  Model m;
  m.add_continuous("x", -10.0, 10.0);
  m.add_continuous("y", -10.0, 10.0);
  m.set_objective_coef(0, 1.0);
  m.add_row("sum", {{0, 1.0}, {1, 1.0}}, Relation::kEqual, 1.0);
  m.add_row("diff", {{0, 1.0}, {1, -1.0}}, Relation::kEqual, 0.0);

  Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.values[0] == doctest::Approx(0.5));
  CHECK(s.values[1] == doctest::Approx(0.5));
}

TEST_CASE("infeasible bounds and rows are reported") {
  Model m;
  m.add_continuous("x", 0.0, 1.0);
  m.add_row("low", {{0, 1.0}}, Relation::kGreaterEqual, 2.0);
  Solution s = solve_lp(m);
  CHECK(s.status == SolveStatus::kInfeasible);
  CHECK_FALSE(s.has_values());

  Model m2;
  m2.add_continuous("x", 0.0, 5.0);
  m2.add_continuous("y", 0.0, 5.0);
  m2.add_row("a", {{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 1.0);
  m2.add_row("b", {{0, 1.0}, {1, 1.0}}, Relation::kGreaterEqual, 3.0);
  CHECK(solve_lp(m2).status == SolveStatus::kInfeasible);
}

TEST_CASE("unbounded rays are reported") {
  Model m;
  m.add_continuous("x", 0.0, kInfinity);
  m.set_objective_coef(0, -1.0);
  m.add_row("r", {{0, 1.0}}, Relation::kGreaterEqual, 1.0);
  CHECK(solve_lp(m).status == SolveStatus::kUnbounded);

  Model m2;  // free variable escaping downward
  m2.add_continuous("x", -kInfinity, kInfinity);
  m2.add_continuous("y", 0.0, 1.0);
  m2.set_objective_coef(0, 1.0);
  m2.add_row("r", {{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 4.0);
  CHECK(solve_lp(m2).status == SolveStatus::kUnbounded);
}

TEST_CASE("free variables reach interior optima") {
  // min t with t >= x - 3 and t >= 3 - x, both free: t = 0 at x = 3.
  Model m;
  m.add_continuous("t", -kInfinity, kInfinity);
  m.add_continuous("x", -kInfinity, kInfinity);
  m.set_objective_coef(0, 1.0);
  m.add_row("up", {{0, 1.0}, {1, -1.0}}, Relation::kGreaterEqual, -3.0);
  m.add_row("dn", {{0, 1.0}, {1, 1.0}}, Relation::kGreaterEqual, 3.0);

  Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(0.0));
  CHECK(s.values[1] == doctest::Approx(3.0));
}

TEST_CASE("degenerate overlapping constraints still terminate") {
  Model m;
  m.add_continuous("x", 0.0, 5.0);
  m.add_continuous("y", 0.0, 5.0);
  m.set_objective_coef(0, 1.0);
  m.set_objective_coef(1, 1.0);
  for (int k = 1; k <= 6; ++k) {
    m.add_row("dup" + std::to_string(k),
              {{0, static_cast<double>(k)}, {1, static_cast<double>(k)}},
              Relation::kGreaterEqual, static_cast<double>(k));
  }
  Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(1.0));
  check_lp_certificate(m, s, 1e-7);
}

TEST_CASE("random boxed lps agree with vertex enumeration") {
  int optimal = 0;
  int infeasible = 0;
  for (std::uint64_t seed = 1; seed <= 160; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    Model m = random_boxed_lp(rng);
    const auto oracle = enumerate_vertices(m);
    Solution s = solve_lp(m);
    if (oracle.feasible) {
      REQUIRE_MESSAGE(s.status == SolveStatus::kOptimal,
                      "solver " << to_string(s.status) << " but oracle found "
                                << oracle.objective);
      CHECK_MESSAGE(near(s.objective, oracle.objective, 1e-7),
                    s.objective << " vs oracle " << oracle.objective);
      CHECK(m.max_violation(s.values) <= 1e-6);
      CHECK(near(m.eval_objective(s.values), s.objective, 1e-8));
      check_lp_certificate(m, s, 1e-7);
      ++optimal;
    } else {
      REQUIRE(s.status == SolveStatus::kInfeasible);
      ++infeasible;
    }
  }
  // The generator must exercise both outcomes for this test to mean much.
  CHECK(optimal >= 60);
  CHECK(infeasible >= 10);
}

TEST_CASE("warm dual re-solve after appending rows") {
  for (std::uint64_t seed = 500; seed < 540; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    Model m = random_boxed_lp(rng, 5, 4);
    m.set_sense(ObjSense::kMinimize);

    std::vector<Simplex::RowSpec> all_rows;
    for (int i = 0; i < m.num_rows(); ++i) {
      all_rows.push_back({m.row(i).terms, m.row(i).rel, m.row(i).rhs});
    }
    std::vector<double> lo(m.num_vars()), hi(m.num_vars()),
        cost(m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) {
      lo[j] = m.var(j).lower;
      hi[j] = m.var(j).upper;
      cost[j] = m.objective_coef(j);
    }

    // Cutting row that shaves the current optimum.
    std::vector<Simplex::RowSpec> base(all_rows);
    Simplex spx;
    spx.load(lo, hi, cost, base, 1e-9);
    if (spx.solve_primal() != LpStatus::kOptimal) continue;

    std::vector<double> x = spx.solution();
    double total = 0.0;
    for (double v : x) total += v;
    Simplex::RowSpec cut;
    for (int j = 0; j < m.num_vars(); ++j) cut.terms.push_back({j, 1.0});
    cut.rel = Relation::kLessEqual;
    cut.rhs = 0.75 * total - 0.01;
    spx.add_rows({cut});
    REQUIRE(spx.make_dual_feasible());
    const LpStatus warm = spx.solve_dual();

    std::vector<Simplex::RowSpec> full(all_rows);
    full.push_back(cut);
    Simplex fresh;
    fresh.load(lo, hi, cost, full, 1e-9);
    const LpStatus cold = fresh.solve_primal();

    REQUIRE(warm == cold);
    if (warm == LpStatus::kOptimal) {
      CHECK_MESSAGE(near(spx.objective(), fresh.objective(), 1e-7),
                    spx.objective() << " vs " << fresh.objective());
    }
  }
}

TEST_CASE("warm dual re-solve after bound changes") {
  for (std::uint64_t seed = 900; seed < 940; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    Model m = random_boxed_lp(rng, 5, 5);

    std::vector<Simplex::RowSpec> rows;
    for (int i = 0; i < m.num_rows(); ++i) {
      rows.push_back({m.row(i).terms, m.row(i).rel, m.row(i).rhs});
    }
    std::vector<double> lo(m.num_vars()), hi(m.num_vars()),
        cost(m.num_vars());
    const double sgn = m.sense() == ObjSense::kMaximize ? -1.0 : 1.0;
    for (int j = 0; j < m.num_vars(); ++j) {
      lo[j] = m.var(j).lower;
      hi[j] = m.var(j).upper;
      cost[j] = sgn * m.objective_coef(j);
    }

    Simplex spx;
    spx.load(lo, hi, cost, rows, 1e-9);
    if (spx.solve_primal() != LpStatus::kOptimal) continue;

    // Halve the first variable's range, as branching would.
    const double mid = 0.5 * (lo[0] + hi[0]);
    spx.set_bounds(0, lo[0], mid);
    REQUIRE(spx.make_dual_feasible());
    const LpStatus warm = spx.solve_dual();

    Simplex fresh;
    std::vector<double> hi2(hi);
    hi2[0] = mid;
    fresh.load(lo, hi2, cost, rows, 1e-9);
    const LpStatus cold = fresh.solve_primal();

    REQUIRE(warm == cold);
    if (warm == LpStatus::kOptimal) {
      CHECK_MESSAGE(near(spx.objective(), fresh.objective(), 1e-7),
                    spx.objective() << " vs " << fresh.objective());
    }
  }
}

TEST_CASE("objective swap keeps the basis usable") {
  int exercised = 0;
  for (std::uint64_t seed = 60; seed < 90; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    Model m = random_boxed_lp(rng, 5, 5);

    std::vector<Simplex::RowSpec> rows;
    for (int i = 0; i < m.num_rows(); ++i) {
      rows.push_back({m.row(i).terms, m.row(i).rel, m.row(i).rhs});
    }
    std::vector<double> lo(m.num_vars()), hi(m.num_vars()), cost(m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) {
      lo[j] = m.var(j).lower;
      hi[j] = m.var(j).upper;
      cost[j] = m.objective_coef(j);
    }
    Simplex spx;
    spx.load(lo, hi, cost, rows, 1e-9);
    if (spx.solve_primal() != LpStatus::kOptimal) continue;

    std::vector<double> cost2(cost);
    for (double& c : cost2) c = -c + 0.5;
    spx.set_cost(cost2);
    REQUIRE(spx.solve_primal() == LpStatus::kOptimal);

    Simplex fresh;
    fresh.load(lo, hi, cost2, rows, 1e-9);
    REQUIRE(fresh.solve_primal() == LpStatus::kOptimal);
    CHECK(near(spx.objective(), fresh.objective(), 1e-8));
    ++exercised;
  }
  CHECK(exercised >= 10);
}

TEST_CASE("basis export and reinstall reproduce the optimum") {
  int exercised = 0;
  for (std::uint64_t seed = 120; seed < 150; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    Model m = random_boxed_lp(rng, 6, 6);

    std::vector<Simplex::RowSpec> rows;
    for (int i = 0; i < m.num_rows(); ++i) {
      rows.push_back({m.row(i).terms, m.row(i).rel, m.row(i).rhs});
    }
    std::vector<double> lo(m.num_vars()), hi(m.num_vars()), cost(m.num_vars());
    for (int j = 0; j < m.num_vars(); ++j) {
      lo[j] = m.var(j).lower;
      hi[j] = m.var(j).upper;
      cost[j] = m.objective_coef(j);
    }
    Simplex spx;
    spx.load(lo, hi, cost, rows, 1e-9);
    if (spx.solve_primal() != LpStatus::kOptimal) continue;
    const double obj = spx.objective();
    const Basis saved = spx.basis();

    Simplex other;
    other.load(lo, hi, cost, rows, 1e-9);
    other.install_basis(saved);
    REQUIRE(other.solve_primal() == LpStatus::kOptimal);
    CHECK(near(other.objective(), obj, 1e-9));
    CHECK(other.iterations() <= 2);
    ++exercised;
  }
  CHECK(exercised >= 10);
}
