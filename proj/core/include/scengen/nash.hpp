// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_NASH_HPP_
#define SCENGEN_NASH_HPP_

#include <array>
#include <vector>

#include "scengen/dmp.hpp"

namespace scengen {

// Players whose disagreement error sits at or below this level have nothing
// left to bargain for; they are held at their ideal instead of joining the
// product.
inline constexpr double kBargainDropThreshold = 1e-9;

// Piecewise-linear sampling of one bargaining term per player. Grid point g
// of an active player t sits at the error level value[t][g] and carries the
// objective weight coeff[t][g] = ln(pi_max[t] - value[t][g]); the top point
// stops a factor delta short of pi_max so the last weight stays finite.
struct BargainGrid {
  std::array<bool, 3> active = {false, false, false};
  std::array<std::vector<double>, 3> value;
  std::array<std::vector<double>, 3> coeff;
  std::array<double, 3> pi_max = {0.0, 0.0, 0.0};
  double delta = 1e-3;
};

BargainGrid build_grid(const std::array<double, 3>& pi_max, int points = 50,
                       double delta = 1e-3);

// Largest gap between ln(pi_max - v) and its chord on any one grid segment,
// summed over the active players: how far the sampled objective can fall
// below the exact log product at the same errors.
double grid_secant_slack(const BargainGrid& grid);

// Assembles the bargaining variant on the shared matching matrix: player
// error variables tied to their deviation blocks, one convex-combination
// grid per active player (SOS2 encoded), and the sampled log product as a
// maximization objective. Players the grid drops keep their error variable
// bounded by the disagreement level instead. The grid must come from
// build_grid on the same status quo.
DmpProblem build_bargaining_dmp(const ScenarioSet& original,
                                const ClusterAssignment& clusters,
                                const ReductionConfig& config,
                                const StatusQuo& quo, const BargainGrid& grid);

// Nash product at the reported errors, dropped players excluded (an empty
// product is 1). All bargaining powers are equal.
double bargaining_product(const std::array<double, 3>& pi,
                          const StatusQuo& quo);

struct BargainResult {
  ReductionResult reduction;
  StatusQuo quo;
  BargainGrid grid;
  std::array<double, 3> pi = {0.0, 0.0, 0.0};  // recomputed player errors
  double product = 0.0;      // at the recomputed errors
  double log_sampled = 0.0;  // MILP objective, the sampled log product
};

// Full bargaining pipeline. The status quo comes from the three omit-mode
// solves unless the caller hands one in; a status quo that needed the
// exact-mean fallback relaxes the bargaining model the same way.
BargainResult reduce_bargaining(const ScenarioSet& original,
                                const ClusterAssignment& clusters,
                                const ReductionConfig& config,
                                const StatusQuo* quo = nullptr,
                                int grid_points = 50);

}  // namespace scengen

#endif  // SCENGEN_NASH_HPP_
