// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_TESTS_TEST_UTIL_HPP_
#define SCENGEN_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scengen/model.hpp"

namespace scengen_test {

// Random boxed LP: every variable gets finite bounds so the feasible set is
// a polytope and the vertex enumeration oracle is exhaustive. Most draws are
// anchored to an interior point (guaranteed feasible, equalities included);
// the rest get fully random right-hand sides and are frequently infeasible.
inline scengen::Model random_boxed_lp(std::mt19937_64& rng, int max_vars = 6,
                                      int max_rows = 8) {
  using scengen::Model;
  using scengen::Relation;
  std::uniform_int_distribution<int> nv(2, max_vars);
  std::uniform_int_distribution<int> nr(1, max_rows);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rel_pick(0, 2);
  std::uniform_real_distribution<double> ub(1.0, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> obj(-9, 9);

  Model m;
  const int n = nv(rng);
  const int r = nr(rng);
  std::vector<double> anchor(n);
  for (int j = 0; j < n; ++j) {
    const double hi = ub(rng);
    m.add_continuous("x" + std::to_string(j), 0.0, hi);
    m.set_objective_coef(j, obj(rng));
    anchor[j] = unit(rng) * hi;
  }
  const bool anchored = rng() % 10 < 7;
  for (int i = 0; i < r; ++i) {
    std::vector<scengen::LinearTerm> terms;
    double row_abs = 0.0;
    double at_anchor = 0.0;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) {
        terms.push_back({j, static_cast<double>(c)});
        row_abs += std::abs(c);
        at_anchor += c * anchor[j];
      }
    }
    if (terms.empty()) {
      terms.push_back({0, 1.0});
      row_abs = 1.0;
      at_anchor = anchor[0];
    }
    Relation rel = Relation::kLessEqual;
    switch (rel_pick(rng)) {
      case 0:
        rel = Relation::kLessEqual;
        break;
      case 1:
        rel = Relation::kGreaterEqual;
        break;
      default:
        rel = Relation::kEqual;
        break;
    }
    double rhs;
    if (anchored) {
      const double slack = unit(rng) * 0.3 * row_abs;
      rhs = rel == Relation::kLessEqual      ? at_anchor + slack
            : rel == Relation::kGreaterEqual ? at_anchor - slack
                                             : at_anchor;
    } else {
      std::uniform_real_distribution<double> rhs_d(-0.5 * row_abs, row_abs);
      rhs = rhs_d(rng);
    }
    m.add_row("c" + std::to_string(i), std::move(terms), rel, rhs);
  }
  if (rng() % 2 == 0) m.set_sense(scengen::ObjSense::kMaximize);
  return m;
}

// Random MILP: boxed continuous part plus binary variables entering rows and
// objective with small integer coefficients.
inline scengen::Model random_milp(std::mt19937_64& rng, int max_bins,
                                  int max_cont, int max_rows) {
  using scengen::Model;
  using scengen::Relation;
  std::uniform_int_distribution<int> nbd(1, max_bins);
  std::uniform_int_distribution<int> ncd(0, max_cont);
  std::uniform_int_distribution<int> nrd(1, max_rows);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> obj(-9, 9);
  std::uniform_real_distribution<double> ubd(1.0, 6.0);

  Model m;
  const int nb = nbd(rng);
  const int nc = ncd(rng);
  const int nr = nrd(rng);
  for (int j = 0; j < nb; ++j) {
    m.add_binary("b" + std::to_string(j));
    m.set_objective_coef(j, obj(rng));
  }
  for (int j = 0; j < nc; ++j) {
    const int v = m.add_continuous("x" + std::to_string(j), 0.0, ubd(rng));
    m.set_objective_coef(v, obj(rng));
  }
  const int n = m.num_vars();
  for (int i = 0; i < nr; ++i) {
    std::vector<scengen::LinearTerm> terms;
    double row_abs = 0.0;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) {
        terms.push_back({j, static_cast<double>(c)});
        row_abs += std::abs(c);
      }
    }
    if (terms.empty()) terms.push_back({i % n, 1.0});
    const int rp = static_cast<int>(rng() % 3);
    Relation rel = rp == 0   ? Relation::kLessEqual
                   : rp == 1 ? Relation::kGreaterEqual
                             : Relation::kEqual;
    std::uniform_real_distribution<double> rhs_d(-0.3 * row_abs, 0.8 * row_abs);
    double rhs = rhs_d(rng);
    if (rel == Relation::kEqual) rhs = std::floor(rhs);
    m.add_row("c" + std::to_string(i), std::move(terms), rel, rhs);
  }
  if (rng() % 2 == 0) m.set_sense(scengen::ObjSense::kMaximize);
  return m;
}

}  // namespace scengen_test

#endif  // SCENGEN_TESTS_TEST_UTIL_HPP_
