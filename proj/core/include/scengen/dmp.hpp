// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_DMP_HPP_
#define SCENGEN_DMP_HPP_

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "scengen/milp.hpp"
#include "scengen/model.hpp"
#include "scengen/sampling.hpp"
#include "scengen/scenario.hpp"
#include "scengen/stats.hpp"

namespace scengen {

// Configuration mismatches, infeasible probability bounds, and solver
// outcomes that leave no usable selection.
class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw matching weights before target normalization. The scalars broadcast
// to every term of their measure; a non-empty table overrides them per term
// (cov is a full square matrix, the upper triangle is read).
struct WeightConfig {
  double sm_all = 1.0;
  double cov_all = 1.0;
  double ecdf_all = 1.0;
  std::vector<std::array<double, 4>> sm;  // [i][m-1]
  std::vector<std::vector<double>> cov;   // [i][i']
  std::vector<double> ecdf;               // [i]

  static WeightConfig uniform(double sm, double cov, double ecdf) {
    WeightConfig w;
    w.sm_all = sm;
    w.cov_all = cov;
    w.ecdf_all = ecdf;
    return w;
  }
};

// Normalizes raw weights by the matching targets: moment and covariance
// weights divide by the target magnitude so every objective term is a
// relative error, distribution weights pass through unchanged. Targets
// within 1e-12 of zero keep the raw weight and are listed in guarded.
WeightTable effective_weights(const WeightConfig& raw,
                              const StatSummary& target);

struct ReductionConfig {
  int num_clusters = 0;  // K; 0 takes the cluster count of the assignment
  Norm norm = Norm::kL1;
  WeightConfig weights;
  double prob_min = 1e-3;
  double prob_max = 1.0;
  // Pin the reduced means to the target exactly instead of penalizing the
  // deviation. Solves that turn infeasible under the pin are retried in the
  // penalized form and flagged on the result.
  bool exact_mean = true;
  SolveSettings solve;
};

// Player removed from the objective. The deviation rows stay in every mode,
// so all four modes share one matrix and differ in objective only.
enum class DmpMode { kFull, kOmitMoments, kOmitCovariance, kOmitEcdf };

// players, in fixed order
inline constexpr int kPlayerMoments = 0;
inline constexpr int kPlayerCovariance = 1;
inline constexpr int kPlayerEcdf = 2;

// An omitted measure keeps this fraction of its weight instead of an exact
// zero. A costless deviation block opens a wide optimal face that stalls
// degenerate bases; the tiebreak collapses the face and picks, among equal
// solutions, the one that also flatters the omitted player.
inline constexpr double kOmitTiebreak = 1e-7;

// Variable indices of an assembled matching model; -1 marks variables the
// configuration does not create.
struct DmpIndices {
  std::vector<int> select;                   // y[n]
  std::vector<int> prob;                     // p[n]
  std::vector<std::array<int, 4>> dev_plus;  // [i][m-1]
  std::vector<std::array<int, 4>> dev_minus;
  std::vector<std::vector<int>> cov_plus;    // [i][i'], i < i'
  std::vector<std::vector<int>> cov_minus;
  std::vector<int> ecdf_max;                 // e[i]
  std::array<int, 3> pi = {-1, -1, -1};
  std::vector<std::vector<int>> lambda;      // [t][g], bargaining grids
};

struct DmpProblem {
  Model model;
  DmpIndices idx;
  StatSummary target;
  WeightTable weights;
  std::vector<int> cluster_of;
  int num_selected = 0;  // K
  double prob_min = 1e-3;
  double prob_max = 1.0;
  Norm norm = Norm::kL1;
  DmpMode mode = DmpMode::kFull;
  bool exact_mean = false;
  bool bargaining = false;
};

// Assembles the selection MILP: one binary and one probability per original
// scenario, deviation variables against every matching target, and lazy
// distribution rows. The objective follows the mode and the configured
// norm; a later set_objective swap reuses the matrix for other modes.
DmpProblem build_dmp(const ScenarioSet& original,
                     const ClusterAssignment& clusters,
                     const ReductionConfig& config,
                     DmpMode mode = DmpMode::kFull);

// Rewrites the objective of an assembled problem for another mode (not
// available for bargaining problems, whose objective is the grid).
void set_objective(DmpProblem* problem, DmpMode mode);

struct ReductionResult {
  ScenarioSet reduced;
  std::vector<int> selection;  // ascending original indices, one per cluster
  ErrorReport errors;          // recomputed from scratch at the reduced set
  Solution solution;
  bool exact_mean = false;
  bool mean_fallback = false;
  bool polished = false;  // cluster-mass probabilities replaced the solver's
};

// Reads the selection out of a solved model, verifies integrality and
// bounds, and recomputes every deviation. When the exact cluster masses are
// feasible and score no worse than the solver's point they are adopted, so
// reducing a set to itself reproduces it bit for bit.
ReductionResult extract_scenarios(const DmpProblem& problem,
                                  const Solution& solution,
                                  const ScenarioSet& original);

// Full pipeline for one mode: build, solve, extract, with the exact-mean
// fallback applied when the pin is infeasible.
ReductionResult reduce(const ScenarioSet& original,
                       const ClusterAssignment& clusters,
                       const ReductionConfig& config,
                       DmpMode mode = DmpMode::kFull);

// Worst acceptable error per player: each omit solve minimizes the other
// players and the abandoned term is re-evaluated at that optimum. All three
// solves share one matrix through a warm-started solver. The weight table
// in force is recorded with the result.
struct StatusQuo {
  std::array<double, 3> pi_max = {0.0, 0.0, 0.0};
  std::array<ErrorReport, 3> at_omit;
  WeightTable weights;
  bool mean_fallback = false;
};

StatusQuo status_quo(const ScenarioSet& original,
                     const ClusterAssignment& clusters,
                     const ReductionConfig& config);

struct ReductionDiagnostics {
  std::vector<std::array<int, 2>> duplicates;  // pairs of kept indices
  int below_prob_min = 0;
  double smallest_prob = 1.0;

  bool ok() const { return duplicates.empty() && below_prob_min == 0; }
};

// Post-checks a reduced set: scenario columns that coincide in every
// parameter, and probabilities below the configured floor.
ReductionDiagnostics diagnose(const ScenarioSet& reduced, double prob_min,
                              double tol = 1e-9);

}  // namespace scengen

#endif  // SCENGEN_DMP_HPP_
