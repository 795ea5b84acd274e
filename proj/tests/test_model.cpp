// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/model.hpp"

#include "doctest.h"

using namespace scengen;

TEST_CASE("variable and row validation") {
  Model m;
  const int x = m.add_continuous("x", 0.0, 2.0);

  CHECK_THROWS_AS(m.add_var("bad", 1.0, 0.0), InvalidModelError);
  CHECK_THROWS_AS(m.add_var("b", -0.5, 1.0, VarKind::kBinary),
                  InvalidModelError);
  CHECK_THROWS_AS(m.add_var("b", 0.0, 2.0, VarKind::kBinary),
                  InvalidModelError);

  CHECK_THROWS_AS(m.add_row("r", {{3, 1.0}}, Relation::kLessEqual, 0.0),
                  InvalidModelError);
  CHECK_THROWS_AS(m.add_row("r", {{x, 1.0}, {x, 2.0}}, Relation::kEqual, 0.0),
                  InvalidModelError);
  CHECK_THROWS_AS(m.set_objective_coef(5, 1.0), InvalidModelError);

  const int r = m.add_row("r", {{x, 2.0}}, Relation::kLessEqual, 3.0);
  CHECK(m.eval_row(r, {1.5}) == doctest::Approx(3.0));
}

TEST_CASE("max_violation covers bounds and all relations") {
  Model m;
  m.add_continuous("x", 0.0, 1.0);
  m.add_continuous("y", 0.0, 1.0);
  m.add_row("le", {{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 1.0);
  m.add_row("ge", {{0, 1.0}}, Relation::kGreaterEqual, 0.25);
  m.add_row("eq", {{1, 1.0}}, Relation::kEqual, 0.5);

  CHECK(m.max_violation({0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(m.max_violation({0.9, 0.9}) == doctest::Approx(0.8));  // le row
  CHECK(m.max_violation({0.0, 0.5}) == doctest::Approx(0.25));  // ge row
  CHECK(m.max_violation({0.5, 1.0}) == doctest::Approx(0.5));   // eq row
  CHECK(m.max_violation({-0.2, 0.5}) == doctest::Approx(0.45));  // bound wins
}

TEST_CASE("encode_sos2 builds the adjacent pair encoding") {
  Model m;
  std::vector<int> lambdas;
  for (int g = 0; g < 4; ++g) {
    lambdas.push_back(m.add_continuous("l" + std::to_string(g), 0.0, 1.0));
  }
  const int before_vars = m.num_vars();
  const int before_rows = m.num_rows();
  m = encode_sos2(std::move(m), lambdas);

  CHECK(m.num_vars() == before_vars + 3);  // one binary per adjacent pair
  CHECK(m.num_rows() == before_rows + 1 + 4);
  CHECK(m.num_binaries() == 3);
  CHECK(m.sos2_groups().size() == 1);

  // Pick row: sum of the pair binaries equals one.
  const RowDef& pick = m.row(before_rows);
  CHECK(pick.rel == Relation::kEqual);
  CHECK(pick.rhs == 1.0);
  CHECK(pick.terms.size() == 3);

  // Interior member is covered by the two adjacent pairs.
  const RowDef& cover1 = m.row(before_rows + 2);
  CHECK(cover1.terms.size() == 3);
  CHECK(cover1.rel == Relation::kLessEqual);
  CHECK(cover1.rhs == 0.0);

  // End members are covered by a single pair.
  CHECK(m.row(before_rows + 1).terms.size() == 2);
  CHECK(m.row(before_rows + 4).terms.size() == 2);
}

TEST_CASE("encode_sos2 rejects malformed groups") {
  Model m;
  const int a = m.add_continuous("a", 0.0, 1.0);
  const int b = m.add_continuous("b", 0.0, 1.0);
  const int wide = m.add_continuous("w", 0.0, 2.0);
  const int bin = m.add_binary("z");

  CHECK_THROWS_AS(encode_sos2(m, {a}), InvalidModelError);
  CHECK_THROWS_AS(encode_sos2(m, {a, a}), InvalidModelError);
  CHECK_THROWS_AS(encode_sos2(m, {a, wide}), InvalidModelError);
  CHECK_THROWS_AS(encode_sos2(m, {a, bin}), InvalidModelError);
  CHECK_THROWS_AS(encode_sos2(m, {a, 99}), InvalidModelError);

  Model ok = encode_sos2(m, {a, b});
  CHECK_THROWS_AS(encode_sos2(ok, {a, b}), InvalidModelError);  // reuse
}

TEST_CASE("status names") {
  CHECK(std::string(to_string(SolveStatus::kOptimal)) == "optimal");
  CHECK(std::string(to_string(SolveStatus::kFeasibleGapMet)) ==
        "feasible-gap-met");
  CHECK(std::string(to_string(SolveStatus::kInfeasible)) == "infeasible");
  CHECK(std::string(to_string(SolveStatus::kUnbounded)) == "unbounded");
  CHECK(std::string(to_string(SolveStatus::kTimeLimit)) == "time-limit");
  CHECK(std::string(to_string(SolveStatus::kNodeLimit)) == "node-limit");
}
