// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference solvers used to validate the simplex and the branch
// and bound. They share no code with the production solver: linear systems
// are solved by a local Gaussian elimination and candidate optima come from
// exhaustive enumeration.

#ifndef SCENGEN_TESTS_ORACLES_HPP_
#define SCENGEN_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "scengen/milp.hpp"
#include "scengen/model.hpp"

namespace scengen_test {

// Solves a dense square system in place; returns false when singular.
inline bool gauss_solve(std::vector<std::vector<double>> a,
                        std::vector<double> b, std::vector<double>* x) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    double best = 1e-10;
    for (int i = k; i < n; ++i) {
      if (std::abs(a[i][k]) > best) {
        best = std::abs(a[i][k]);
        piv = i;
      }
    }
    if (piv < 0) return false;
    std::swap(a[piv], a[k]);
    std::swap(b[piv], b[k]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      if (f == 0.0) continue;
      for (int c = k; c < n; ++c) a[i][c] -= f * a[k][c];
      b[i] -= f * b[k];
    }
  }
  x->assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int c = i + 1; c < n; ++c) s -= a[i][c] * (*x)[c];
    (*x)[i] = s / a[i][i];
  }
  return true;
}

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

// Enumerates every basic point: each choice of n constraints from
// {rows as equalities} U {variable bounds} intersected as a square system.
// Feasible candidates are scored by the objective. Intended for tiny models
// (n <= 8, rows <= 10) whose optimum is attained at a vertex.
inline OracleResult enumerate_vertices(const scengen::Model& m,
                                       double feas_tol = 1e-7) {
  using scengen::Relation;
  const int n = m.num_vars();
  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> planes;
  for (int r = 0; r < m.num_rows(); ++r) {
    Plane p;
    p.a.assign(n, 0.0);
    for (const auto& t : m.row(r).terms) p.a[t.var] = t.coef;
    p.rhs = m.row(r).rhs;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(m.var(j).lower)) {
      Plane p;
      p.a.assign(n, 0.0);
      p.a[j] = 1.0;
      p.rhs = m.var(j).lower;
      planes.push_back(std::move(p));
    }
    if (std::isfinite(m.var(j).upper) && m.var(j).upper != m.var(j).lower) {
      Plane p;
      p.a.assign(n, 0.0);
      p.a[j] = 1.0;
      p.rhs = m.var(j).upper;
      planes.push_back(std::move(p));
    }
  }

  OracleResult best;
  const bool maximize = m.sense() == scengen::ObjSense::kMaximize;
  const int total = static_cast<int>(planes.size());

  // Iterative combination enumeration to avoid recursion limits.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  if (total < n) return best;
  for (;;) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = planes[idx[i]].a;
      b[i] = planes[idx[i]].rhs;
    }
    std::vector<double> x;
    if (gauss_solve(a, b, &x)) {
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) {
        if (x[j] < m.var(j).lower - feas_tol || x[j] > m.var(j).upper + feas_tol) {
          ok = false;
        }
      }
      for (int r = 0; r < m.num_rows() && ok; ++r) {
        const double v = m.eval_row(r, x);
        switch (m.row(r).rel) {
          case Relation::kLessEqual:
            ok = v <= m.row(r).rhs + feas_tol;
            break;
          case Relation::kGreaterEqual:
            ok = v >= m.row(r).rhs - feas_tol;
            break;
          case Relation::kEqual:
            ok = std::abs(v - m.row(r).rhs) <= feas_tol;
            break;
        }
      }
      if (ok) {
        const double obj = m.eval_objective(x);
        if (!best.feasible || (maximize ? obj > best.objective
                                        : obj < best.objective)) {
          best.feasible = true;
          best.objective = obj;
          best.x = x;
        }
      }
    }
    // next combination
    int i = n - 1;
    while (i >= 0 && idx[i] == total - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

// Exhaustive MILP oracle: enumerates all binary assignments and solves the
// continuous rest with solve_lp (itself validated against the vertex
// enumeration). Lazy rows are enforced as ordinary rows.
inline OracleResult enumerate_milp(const scengen::Model& m,
                                   const scengen::SolveSettings& settings = {}) {
  std::vector<int> bins;
  for (int j = 0; j < m.num_vars(); ++j) {
    if (m.var(j).kind == scengen::VarKind::kBinary) bins.push_back(j);
  }
  const int nb = static_cast<int>(bins.size());
  OracleResult best;
  const bool maximize = m.sense() == scengen::ObjSense::kMaximize;
  scengen::Model work = m;
  for (std::uint64_t mask = 0; mask < (1ULL << nb); ++mask) {
    bool in_bounds = true;
    for (int k = 0; k < nb; ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      const auto& var = m.var(bins[k]);
      if (v < var.lower || v > var.upper) {
        in_bounds = false;
        break;
      }
    }
    if (!in_bounds) continue;
    for (int k = 0; k < nb; ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      work.set_var_bounds(bins[k], v, v);
    }
    scengen::Solution s = scengen::solve_lp(work, settings);
    if (s.status != scengen::SolveStatus::kOptimal) continue;
    if (!best.feasible || (maximize ? s.objective > best.objective
                                    : s.objective < best.objective)) {
      best.feasible = true;
      best.objective = s.objective;
      best.x = s.values;
    }
  }
  return best;
}

}  // namespace scengen_test

#endif  // SCENGEN_TESTS_ORACLES_HPP_
