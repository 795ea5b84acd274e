// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_MILP_HPP_
#define SCENGEN_MILP_HPP_

#include <memory>

#include "scengen/model.hpp"

namespace scengen {

// Solves the continuous relaxation (variable kinds ignored). Lazy rows are
// ordinary rows here. Fills row_duals with the marginal objective change per
// unit of right-hand side in the model's own sense.
Solution solve_lp(const Model& model, const SolveSettings& settings = {});

// Branch and bound over the simplex relaxation: most-fractional binary
// branching, best-bound node selection, deterministic index tie-breaks.
// Rows flagged lazy start outside the relaxation and are activated when an
// integer candidate violates them, so reported solutions satisfy every row.
Solution solve_milp(const Model& model, const SolveSettings& settings = {});

// Retains the loaded matrix, simplex basis and activated lazy rows between
// solves. When consecutive models share rows, bounds and variables (only the
// objective differs), the next solve warm starts from the previous basis
// instead of reloading; anything else triggers a transparent reload.
class MilpSolver {
 public:
  MilpSolver();
  ~MilpSolver();
  MilpSolver(MilpSolver&&) noexcept;
  MilpSolver& operator=(MilpSolver&&) noexcept;

  Solution solve(const Model& model, const SolveSettings& settings = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scengen

#endif  // SCENGEN_MILP_HPP_
