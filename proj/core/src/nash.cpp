// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/nash.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace scengen {

BargainGrid build_grid(const std::array<double, 3>& pi_max, int points,
                       double delta) {
  if (points < 2)
    throw ReductionError("bargaining grids need at least two points");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw ReductionError("grid margin delta must sit inside (0, 1)");
  BargainGrid grid;
  grid.pi_max = pi_max;
  grid.delta = delta;
  for (int t = 0; t < 3; ++t) {
    if (!(pi_max[t] >= 0.0))
      throw ReductionError("disagreement errors must be nonnegative");
    if (pi_max[t] <= kBargainDropThreshold) continue;
    grid.active[t] = true;
    grid.value[t].reserve(points);
    grid.coeff[t].reserve(points);
    for (int g = 0; g < points; ++g) {
      const double v = pi_max[t] * (1.0 - delta) * g / (points - 1);
      grid.value[t].push_back(v);
      grid.coeff[t].push_back(std::log(pi_max[t] - v));
    }
  }
  return grid;
}

double grid_secant_slack(const BargainGrid& grid) {
  double total = 0.0;
  for (int t = 0; t < 3; ++t) {
    if (!grid.active[t]) continue;
    const double pmax = grid.pi_max[t];
    double worst = 0.0;
    for (std::size_t g = 0; g + 1 < grid.value[t].size(); ++g) {
      const double v0 = grid.value[t][g];
      const double v1 = grid.value[t][g + 1];
      const double slope =
          (grid.coeff[t][g + 1] - grid.coeff[t][g]) / (v1 - v0);
      // the chord gap of a strictly concave curve peaks where the tangent
      // matches the chord slope
      const double vs = pmax + 1.0 / slope;
      const double gap =
          std::log(pmax - vs) - (grid.coeff[t][g] + slope * (vs - v0));
      worst = std::max(worst, gap);
    }
    total += worst;
  }
  return total;
}

DmpProblem build_bargaining_dmp(const ScenarioSet& original,
                                const ClusterAssignment& clusters,
                                const ReductionConfig& config,
                                const StatusQuo& quo,
                                const BargainGrid& grid) {
  DmpProblem prob = build_dmp(original, clusters, config, DmpMode::kFull);
  prob.bargaining = true;
  Model& mdl = prob.model;
  DmpIndices& idx = prob.idx;
  const WeightTable& w = prob.weights;
  const int np = original.num_params();

  // Under the term-wise norm the base model carries no player variables;
  // tie one to each weighted deviation block. The worst-case norm already
  // has them pressed onto the largest term by its cap rows.
  if (prob.norm == Norm::kL1) {
    idx.pi[kPlayerMoments] = mdl.add_continuous("piS", 0.0, kInfinity);
    idx.pi[kPlayerCovariance] = mdl.add_continuous("piC", 0.0, kInfinity);
    idx.pi[kPlayerEcdf] = mdl.add_continuous("piE", 0.0, kInfinity);
    {
      std::vector<LinearTerm> terms;
      for (int i = 0; i < np; ++i)
        for (int m = 1; m <= 4; ++m) {
          if (idx.dev_plus[i][m - 1] < 0) continue;
          terms.push_back({idx.dev_plus[i][m - 1], w.sm[i][m - 1]});
          terms.push_back({idx.dev_minus[i][m - 1], w.sm[i][m - 1]});
        }
      terms.push_back({idx.pi[kPlayerMoments], -1.0});
      mdl.add_row("lkS", std::move(terms), Relation::kEqual, 0.0);
    }
    {
      std::vector<LinearTerm> terms;
      for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
          terms.push_back({idx.cov_plus[i][j], w.cov[i][j]});
          terms.push_back({idx.cov_minus[i][j], w.cov[i][j]});
        }
      terms.push_back({idx.pi[kPlayerCovariance], -1.0});
      mdl.add_row("lkC", std::move(terms), Relation::kEqual, 0.0);
    }
    {
      std::vector<LinearTerm> terms;
      for (int i = 0; i < np; ++i)
        terms.push_back({idx.ecdf_max[i], w.ecdf[i]});
      terms.push_back({idx.pi[kPlayerEcdf], -1.0});
      mdl.add_row("lkE", std::move(terms), Relation::kEqual, 0.0);
    }
  }

  for (int j = 0; j < mdl.num_vars(); ++j) mdl.set_objective_coef(j, 0.0);
  mdl.set_sense(ObjSense::kMaximize);

  idx.lambda.assign(3, {});
  for (int t = 0; t < 3; ++t) {
    if (!grid.active[t]) {
      // nothing to gain: hold the player at its disagreement level
      mdl.set_var_bounds(idx.pi[t], 0.0, std::max(quo.pi_max[t], 0.0));
      continue;
    }
    const int points = static_cast<int>(grid.value[t].size());
    for (int g = 0; g < points; ++g)
      idx.lambda[t].push_back(mdl.add_continuous(
          "lam" + std::to_string(t) + "_" + std::to_string(g), 0.0, 1.0));
    {
      std::vector<LinearTerm> terms;
      for (int g = 0; g < points; ++g)
        terms.push_back({idx.lambda[t][g], 1.0});
      mdl.add_row("nv" + std::to_string(t), std::move(terms), Relation::kEqual,
                  1.0);
    }
    {
      std::vector<LinearTerm> terms{{idx.pi[t], 1.0}};
      for (int g = 0; g < points; ++g)
        if (grid.value[t][g] != 0.0)
          terms.push_back({idx.lambda[t][g], -grid.value[t][g]});
      mdl.add_row("ne" + std::to_string(t), std::move(terms), Relation::kEqual,
                  0.0);
    }
    for (int g = 0; g < points; ++g)
      mdl.set_objective_coef(idx.lambda[t][g], grid.coeff[t][g]);
  }
  for (int t = 0; t < 3; ++t)
    if (grid.active[t])
      prob.model = encode_sos2(std::move(prob.model), idx.lambda[t]);
  return prob;
}

double bargaining_product(const std::array<double, 3>& pi,
                          const StatusQuo& quo) {
  double prod = 1.0;
  for (int t = 0; t < 3; ++t)
    if (quo.pi_max[t] > kBargainDropThreshold)
      prod *= std::max(0.0, quo.pi_max[t] - pi[t]);
  return prod;
}

BargainResult reduce_bargaining(const ScenarioSet& original,
                                const ClusterAssignment& clusters,
                                const ReductionConfig& config,
                                const StatusQuo* quo, int grid_points) {
  BargainResult out;
  out.quo = quo ? *quo : status_quo(original, clusters, config);
  out.grid = build_grid(out.quo.pi_max, grid_points);

  ReductionConfig cfg = config;
  if (out.quo.mean_fallback) cfg.exact_mean = false;
  DmpProblem prob =
      build_bargaining_dmp(original, clusters, cfg, out.quo, out.grid);
  Solution sol = solve_milp(prob.model, cfg.solve);
  bool fallback = out.quo.mean_fallback;
  if (sol.status == SolveStatus::kInfeasible && prob.exact_mean) {
    cfg.exact_mean = false;
    prob = build_bargaining_dmp(original, clusters, cfg, out.quo, out.grid);
    sol = solve_milp(prob.model, cfg.solve);
    fallback = true;
  }
  out.reduction = extract_scenarios(prob, sol, original);
  out.reduction.mean_fallback = fallback;
  out.pi = {out.reduction.errors.pi_sm, out.reduction.errors.pi_cov,
            out.reduction.errors.pi_ecdf};
  out.product = bargaining_product(out.pi, out.quo);
  out.log_sampled = sol.objective;
  return out;
}

}  // namespace scengen
