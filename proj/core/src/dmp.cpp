// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/dmp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace scengen {

namespace {

std::string item(const std::string& head, const std::string& name, int m) {
  return head + " " + name + ":" + std::to_string(m);
}

}  // namespace

WeightTable effective_weights(const WeightConfig& raw,
                              const StatSummary& target) {
  const int np = static_cast<int>(target.names.size());
  if (!raw.sm.empty() && static_cast<int>(raw.sm.size()) != np)
    throw ReductionError("moment weight table does not match the parameters");
  if (!raw.ecdf.empty() && static_cast<int>(raw.ecdf.size()) != np)
    throw ReductionError(
        "distribution weight table does not match the parameters");
  if (!raw.cov.empty()) {
    if (static_cast<int>(raw.cov.size()) != np)
      throw ReductionError(
          "covariance weight table does not match the parameters");
    for (const auto& row : raw.cov)
      if (static_cast<int>(row.size()) != np)
        throw ReductionError("covariance weight table is not square");
  }

  WeightTable w;
  w.sm.assign(np, {0.0, 0.0, 0.0, 0.0});
  w.cov.assign(np, std::vector<double>(np, 0.0));
  w.ecdf.assign(np, 0.0);
  for (int i = 0; i < np; ++i) {
    for (int m = 1; m <= 4; ++m) {
      const double rw = raw.sm.empty() ? raw.sm_all : raw.sm[i][m - 1];
      if (rw < 0.0)
        throw ReductionError("matching weights must be nonnegative");
      double denom = std::abs(target.moments[i][m - 1]);
      if (denom < 1e-12) {
        denom = 1.0;
        w.guarded.push_back(item("moment", target.names[i], m));
      }
      w.sm[i][m - 1] = rw / denom;
    }
    const double re = raw.ecdf.empty() ? raw.ecdf_all : raw.ecdf[i];
    if (re < 0.0) throw ReductionError("matching weights must be nonnegative");
    w.ecdf[i] = re;
    for (int j = i + 1; j < np; ++j) {
      const double rw = raw.cov.empty() ? raw.cov_all : raw.cov[i][j];
      if (rw < 0.0)
        throw ReductionError("matching weights must be nonnegative");
      double denom = std::abs(target.covariance[i][j]);
      if (denom < 1e-12) {
        denom = 1.0;
        w.guarded.push_back("covariance " + target.names[i] + "*" +
                            target.names[j]);
      }
      w.cov[i][j] = w.cov[j][i] = rw / denom;
    }
  }
  return w;
}

DmpProblem build_dmp(const ScenarioSet& original,
                     const ClusterAssignment& clusters,
                     const ReductionConfig& config, DmpMode mode) {
  original.validate();
  const int n = original.num_scenarios();
  const int np = original.num_params();
  if (static_cast<int>(clusters.label.size()) != n)
    throw ReductionError("cluster assignment does not cover the scenario set");
  const int k = clusters.num_clusters();
  if (config.num_clusters > 0 && config.num_clusters != k)
    throw ReductionError("configured cluster count " +
                         std::to_string(config.num_clusters) +
                         " does not match the assignment's " +
                         std::to_string(k));
  std::vector<std::vector<int>> members(k);
  for (int nn = 0; nn < n; ++nn) {
    const int lbl = clusters.label[nn];
    if (lbl < 0 || lbl >= k)
      throw ReductionError("cluster label out of range");
    members[lbl].push_back(nn);
  }
  for (int kk = 0; kk < k; ++kk)
    if (members[kk].empty())
      throw ReductionError("cluster " + std::to_string(kk) + " is empty");
  if (!(config.prob_min >= 0.0) || !(config.prob_max <= 1.0) ||
      config.prob_min > config.prob_max)
    throw ReductionError("probability bounds must satisfy 0 <= min <= max <= 1");
  if (k * config.prob_min > 1.0 + 1e-12 || k * config.prob_max < 1.0 - 1e-12)
    throw ReductionError(
        "probability bounds admit no mass split: K*min <= 1 <= K*max fails");

  DmpProblem prob;
  prob.target = summarize(original);
  prob.weights = effective_weights(config.weights, prob.target);
  prob.cluster_of = clusters.label;
  prob.num_selected = k;
  prob.prob_min = config.prob_min;
  prob.prob_max = config.prob_max;
  prob.norm = config.norm;
  prob.exact_mean = config.exact_mean;

  Model& mdl = prob.model;
  DmpIndices& idx = prob.idx;

  idx.prob.resize(n);
  idx.select.resize(n);
  for (int nn = 0; nn < n; ++nn)
    idx.prob[nn] =
        mdl.add_continuous("p" + std::to_string(nn), 0.0, config.prob_max);
  for (int nn = 0; nn < n; ++nn)
    idx.select[nn] = mdl.add_binary("y" + std::to_string(nn));

  const int m_lo = config.exact_mean ? 2 : 1;
  idx.dev_plus.assign(np, {-1, -1, -1, -1});
  idx.dev_minus.assign(np, {-1, -1, -1, -1});
  for (int i = 0; i < np; ++i)
    for (int m = m_lo; m <= 4; ++m) {
      const std::string tag = std::to_string(i) + "_" + std::to_string(m);
      idx.dev_plus[i][m - 1] = mdl.add_continuous("dp" + tag, 0.0, kInfinity);
      idx.dev_minus[i][m - 1] = mdl.add_continuous("dm" + tag, 0.0, kInfinity);
    }
  idx.cov_plus.assign(np, std::vector<int>(np, -1));
  idx.cov_minus.assign(np, std::vector<int>(np, -1));
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      const std::string tag = std::to_string(i) + "_" + std::to_string(j);
      idx.cov_plus[i][j] = mdl.add_continuous("cp" + tag, 0.0, kInfinity);
      idx.cov_minus[i][j] = mdl.add_continuous("cm" + tag, 0.0, kInfinity);
    }
  idx.ecdf_max.resize(np);
  for (int i = 0; i < np; ++i)
    idx.ecdf_max[i] = mdl.add_continuous("e" + std::to_string(i), 0.0, 1.0);
  if (config.norm == Norm::kLinf) {
    idx.pi[kPlayerMoments] = mdl.add_continuous("piS", 0.0, kInfinity);
    idx.pi[kPlayerCovariance] = mdl.add_continuous("piC", 0.0, kInfinity);
    idx.pi[kPlayerEcdf] = mdl.add_continuous("piE", 0.0, kInfinity);
  }

  // one kept scenario per cluster
  for (int kk = 0; kk < k; ++kk) {
    std::vector<LinearTerm> terms;
    for (int nn : members[kk]) terms.push_back({idx.select[nn], 1.0});
    mdl.add_row("pk" + std::to_string(kk), std::move(terms), Relation::kEqual,
                1.0);
  }
  // probabilities live only on kept scenarios, inside the configured band
  for (int nn = 0; nn < n; ++nn) {
    mdl.add_row("lo" + std::to_string(nn),
                {{idx.prob[nn], 1.0}, {idx.select[nn], -config.prob_min}},
                Relation::kGreaterEqual, 0.0);
    mdl.add_row("hi" + std::to_string(nn),
                {{idx.prob[nn], 1.0}, {idx.select[nn], -config.prob_max}},
                Relation::kLessEqual, 0.0);
  }
  {
    std::vector<LinearTerm> terms;
    for (int nn = 0; nn < n; ++nn) terms.push_back({idx.prob[nn], 1.0});
    mdl.add_row("mass", std::move(terms), Relation::kEqual, 1.0);
  }
  // moment matching; the mean row is an equality when the pin is active
  for (int i = 0; i < np; ++i) {
    const double mean = prob.target.moments[i][0];
    {
      std::vector<LinearTerm> terms;
      for (int nn = 0; nn < n; ++nn)
        terms.push_back({idx.prob[nn], original.values[i][nn]});
      if (!config.exact_mean) {
        terms.push_back({idx.dev_plus[i][0], 1.0});
        terms.push_back({idx.dev_minus[i][0], -1.0});
      }
      mdl.add_row("m" + std::to_string(i) + "_1", std::move(terms),
                  Relation::kEqual, mean);
    }
    for (int m = 2; m <= 4; ++m) {
      std::vector<LinearTerm> terms;
      for (int nn = 0; nn < n; ++nn) {
        const double d = original.values[i][nn] - mean;
        double coef = d;
        for (int q = 1; q < m; ++q) coef *= d;
        terms.push_back({idx.prob[nn], coef});
      }
      terms.push_back({idx.dev_plus[i][m - 1], 1.0});
      terms.push_back({idx.dev_minus[i][m - 1], -1.0});
      mdl.add_row("m" + std::to_string(i) + "_" + std::to_string(m),
                  std::move(terms), Relation::kEqual,
                  prob.target.moments[i][m - 1]);
    }
  }
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      std::vector<LinearTerm> terms;
      for (int nn = 0; nn < n; ++nn)
        terms.push_back({idx.prob[nn],
                         (original.values[i][nn] - prob.target.moments[i][0]) *
                             (original.values[j][nn] - prob.target.moments[j][0])});
      terms.push_back({idx.cov_plus[i][j], 1.0});
      terms.push_back({idx.cov_minus[i][j], -1.0});
      mdl.add_row("c" + std::to_string(i) + "_" + std::to_string(j),
                  std::move(terms), Relation::kEqual,
                  prob.target.covariance[i][j]);
    }
  if (config.norm == Norm::kLinf) {
    // epigraph caps: each player variable dominates its weighted terms
    for (int i = 0; i < np; ++i)
      for (int m = m_lo; m <= 4; ++m) {
        const double w = prob.weights.sm[i][m - 1];
        mdl.add_row("kS" + std::to_string(i) + "_" + std::to_string(m),
                    {{idx.dev_plus[i][m - 1], w},
                     {idx.dev_minus[i][m - 1], w},
                     {idx.pi[kPlayerMoments], -1.0}},
                    Relation::kLessEqual, 0.0);
      }
    for (int i = 0; i < np; ++i)
      for (int j = i + 1; j < np; ++j) {
        const double w = prob.weights.cov[i][j];
        mdl.add_row("kC" + std::to_string(i) + "_" + std::to_string(j),
                    {{idx.cov_plus[i][j], w},
                     {idx.cov_minus[i][j], w},
                     {idx.pi[kPlayerCovariance], -1.0}},
                    Relation::kLessEqual, 0.0);
      }
    for (int i = 0; i < np; ++i)
      mdl.add_row("kE" + std::to_string(i),
                  {{idx.ecdf_max[i], prob.weights.ecdf[i]},
                   {idx.pi[kPlayerEcdf], -1.0}},
                  Relation::kLessEqual, 0.0);
  }
  // distribution rows, lazy: with phi_in eliminated they read
  //   e_i >= +(F_in*y_n - S_in) - (1 - y_n)
  //   e_i >= -(F_in*y_n - S_in) - (1 - y_n)
  // where S_in is the kept mass at or below the level of scenario n
  for (int i = 0; i < np; ++i) {
    for (int nn = 0; nn < n; ++nn) {
      const double f = prob.target.ecdf[i][nn];
      std::vector<int> below;
      for (int n2 = 0; n2 < n; ++n2)
        if (original.values[i][n2] <= original.values[i][nn])
          below.push_back(n2);
      const std::string tag =
          std::to_string(i) + "_" + std::to_string(nn);
      {
        std::vector<LinearTerm> terms{{idx.ecdf_max[i], 1.0},
                                      {idx.select[nn], -(f + 1.0)}};
        for (int n2 : below) terms.push_back({idx.prob[n2], 1.0});
        mdl.add_row("fl" + tag, std::move(terms), Relation::kGreaterEqual,
                    -1.0, true);
      }
      {
        std::vector<LinearTerm> terms{{idx.ecdf_max[i], 1.0}};
        if (f != 1.0) terms.push_back({idx.select[nn], f - 1.0});
        for (int n2 : below) terms.push_back({idx.prob[n2], -1.0});
        mdl.add_row("fh" + tag, std::move(terms), Relation::kGreaterEqual,
                    -1.0, true);
      }
    }
  }

  set_objective(&prob, mode);
  return prob;
}

void set_objective(DmpProblem* problem, DmpMode mode) {
  if (problem->bargaining)
    throw ReductionError("bargaining objectives are fixed at build time");
  Model& mdl = problem->model;
  const DmpIndices& idx = problem->idx;
  const WeightTable& w = problem->weights;
  const int np = static_cast<int>(idx.ecdf_max.size());
  mdl.set_sense(ObjSense::kMinimize);
  const double f_sm = mode == DmpMode::kOmitMoments ? kOmitTiebreak : 1.0;
  const double f_cov = mode == DmpMode::kOmitCovariance ? kOmitTiebreak : 1.0;
  const double f_ecdf = mode == DmpMode::kOmitEcdf ? kOmitTiebreak : 1.0;
  for (int j = 0; j < mdl.num_vars(); ++j) mdl.set_objective_coef(j, 0.0);
  if (problem->norm == Norm::kL1) {
    for (int i = 0; i < np; ++i)
      for (int m = 1; m <= 4; ++m) {
        if (idx.dev_plus[i][m - 1] < 0) continue;
        mdl.set_objective_coef(idx.dev_plus[i][m - 1], f_sm * w.sm[i][m - 1]);
        mdl.set_objective_coef(idx.dev_minus[i][m - 1], f_sm * w.sm[i][m - 1]);
      }
    for (int i = 0; i < np; ++i)
      for (int j = i + 1; j < np; ++j) {
        mdl.set_objective_coef(idx.cov_plus[i][j], f_cov * w.cov[i][j]);
        mdl.set_objective_coef(idx.cov_minus[i][j], f_cov * w.cov[i][j]);
      }
    for (int i = 0; i < np; ++i)
      mdl.set_objective_coef(idx.ecdf_max[i], f_ecdf * w.ecdf[i]);
  } else {
    mdl.set_objective_coef(idx.pi[kPlayerMoments], f_sm);
    mdl.set_objective_coef(idx.pi[kPlayerCovariance], f_cov);
    mdl.set_objective_coef(idx.pi[kPlayerEcdf], f_ecdf);
  }
  problem->mode = mode;
}

namespace {

// objective value a deviation report implies for the given mode, matching
// the model exactly (the pinned mean contributes no term)
double mode_score(const ErrorReport& r, const WeightTable& w, Norm norm,
                  DmpMode mode, bool exact_mean) {
  const int np = static_cast<int>(w.ecdf.size());
  double sm = 0.0, cov = 0.0, ec = 0.0;
  for (int i = 0; i < np; ++i) {
    for (int m = exact_mean ? 2 : 1; m <= 4; ++m) {
      const double term =
          w.sm[i][m - 1] * (r.dev_plus[i][m - 1] + r.dev_minus[i][m - 1]);
      sm = norm == Norm::kL1 ? sm + term : std::max(sm, term);
    }
    const double te = w.ecdf[i] * r.ecdf_max[i];
    ec = norm == Norm::kL1 ? ec + te : std::max(ec, te);
    for (int j = i + 1; j < np; ++j) {
      const double tc = w.cov[i][j] * (r.cov_plus[i][j] + r.cov_minus[i][j]);
      cov = norm == Norm::kL1 ? cov + tc : std::max(cov, tc);
    }
  }
  double score = 0.0;
  if (mode != DmpMode::kOmitMoments) score += sm;
  if (mode != DmpMode::kOmitCovariance) score += cov;
  if (mode != DmpMode::kOmitEcdf) score += ec;
  return score;
}

ScenarioSet take_columns(const ScenarioSet& original,
                         const std::vector<int>& selection,
                         std::vector<double> prob) {
  ScenarioSet out;
  out.names = original.names;
  out.values.assign(original.names.size(), {});
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i].reserve(selection.size());
    for (int nn : selection) out.values[i].push_back(original.values[i][nn]);
  }
  out.prob = std::move(prob);
  return out;
}

}  // namespace

ReductionResult extract_scenarios(const DmpProblem& problem,
                                  const Solution& solution,
                                  const ScenarioSet& original) {
  if (!solution.has_values())
    throw ReductionError(std::string("no feasible selection available "
                                     "(solver status ") +
                         to_string(solution.status) + ")");
  const int n = original.num_scenarios();
  const auto& x = solution.values;

  std::vector<int> selection;
  for (int nn = 0; nn < n; ++nn) {
    const double v = x[problem.idx.select[nn]];
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-5)
      throw ReductionError("selection variable of scenario " +
                           std::to_string(nn) + " is fractional (" +
                           std::to_string(v) + ")");
    if (r == 1.0) selection.push_back(nn);
  }
  if (static_cast<int>(selection.size()) != problem.num_selected)
    throw ReductionError("solution keeps " +
                         std::to_string(selection.size()) +
                         " scenarios, expected " +
                         std::to_string(problem.num_selected));
  {
    std::vector<int> seen(problem.num_selected, 0);
    for (int nn : selection) seen[problem.cluster_of[nn]]++;
    for (int c : seen)
      if (c != 1)
        throw ReductionError("solution does not keep one scenario per cluster");
  }

  // solver probabilities, snapped to the band edges and renormalized
  std::vector<double> pr(selection.size());
  for (std::size_t j = 0; j < selection.size(); ++j) {
    double p = x[problem.idx.prob[selection[j]]];
    if (std::abs(p - problem.prob_min) <= 1e-9) p = problem.prob_min;
    if (std::abs(p - problem.prob_max) <= 1e-9) p = problem.prob_max;
    pr[j] = std::max(p, 0.0);
  }
  double mass = 0.0;
  for (double p : pr) mass += p;
  if (mass <= 0.0) throw ReductionError("kept probabilities have no mass");
  if (mass != 1.0)
    for (double& p : pr) p /= mass;

  ReductionResult res;
  res.selection = selection;
  res.solution = solution;
  res.exact_mean = problem.exact_mean;
  res.reduced = take_columns(original, selection, std::move(pr));
  res.errors = recompute_errors(problem.target, res.reduced, selection,
                                problem.weights, problem.norm);

  // candidate probabilities: the exact mass of each kept scenario's cluster.
  // Adopting them when they are feasible and score no worse keeps the
  // identity reduction bitwise exact.
  std::vector<double> cand(selection.size(), 0.0);
  for (int nn = 0; nn < n; ++nn)
    for (std::size_t j = 0; j < selection.size(); ++j)
      if (problem.cluster_of[nn] == problem.cluster_of[selection[j]]) {
        cand[j] += original.prob[nn];
        break;
      }
  double cmass = 0.0;
  bool feasible = true;
  for (double p : cand) {
    cmass += p;
    feasible = feasible && p >= problem.prob_min - 1e-12 &&
               p <= problem.prob_max + 1e-12;
  }
  feasible = feasible && std::abs(cmass - 1.0) <= 1e-12;
  if (feasible) {
    ScenarioSet cand_set = take_columns(original, selection, cand);
    ErrorReport cand_err = recompute_errors(
        problem.target, cand_set, selection, problem.weights, problem.norm);
    if (problem.exact_mean)
      for (std::size_t i = 0; i < original.names.size() && feasible; ++i)
        feasible = cand_err.dev_plus[i][0] + cand_err.dev_minus[i][0] <= 1e-9;
    bool adopt = false;
    if (feasible) {
      if (problem.bargaining) {
        adopt = cand_err.pi_sm <= res.errors.pi_sm + 1e-12 &&
                cand_err.pi_cov <= res.errors.pi_cov + 1e-12 &&
                cand_err.pi_ecdf <= res.errors.pi_ecdf + 1e-12;
      } else {
        adopt = mode_score(cand_err, problem.weights, problem.norm,
                           problem.mode, problem.exact_mean) <=
                mode_score(res.errors, problem.weights, problem.norm,
                           problem.mode, problem.exact_mean) +
                    1e-9;
      }
    }
    if (adopt) {
      res.reduced = std::move(cand_set);
      res.errors = std::move(cand_err);
      res.polished = true;
    }
  }
  res.reduced.validate();
  return res;
}

ReductionResult reduce(const ScenarioSet& original,
                       const ClusterAssignment& clusters,
                       const ReductionConfig& config, DmpMode mode) {
  DmpProblem prob = build_dmp(original, clusters, config, mode);
  Solution sol = solve_milp(prob.model, config.solve);
  bool fallback = false;
  if (sol.status == SolveStatus::kInfeasible && prob.exact_mean) {
    ReductionConfig relaxed = config;
    relaxed.exact_mean = false;
    prob = build_dmp(original, clusters, relaxed, mode);
    sol = solve_milp(prob.model, config.solve);
    fallback = true;
  }
  ReductionResult res = extract_scenarios(prob, sol, original);
  res.mean_fallback = fallback;
  return res;
}

StatusQuo status_quo(const ScenarioSet& original,
                     const ClusterAssignment& clusters,
                     const ReductionConfig& config) {
  ReductionConfig cfg = config;
  DmpProblem prob = build_dmp(original, clusters, cfg, DmpMode::kFull);
  MilpSolver solver;
  StatusQuo quo;
  quo.weights = prob.weights;
  const DmpMode modes[3] = {DmpMode::kOmitMoments, DmpMode::kOmitCovariance,
                            DmpMode::kOmitEcdf};
  for (int t = 0; t < 3; ++t) {
    set_objective(&prob, modes[t]);
    Solution sol = solver.solve(prob.model, cfg.solve);
    if (sol.status == SolveStatus::kInfeasible && prob.exact_mean) {
      cfg.exact_mean = false;
      prob = build_dmp(original, clusters, cfg, modes[t]);
      quo.mean_fallback = true;
      sol = solver.solve(prob.model, cfg.solve);
    }
    ReductionResult res = extract_scenarios(prob, sol, original);
    quo.at_omit[t] = res.errors;
    quo.pi_max[t] = t == kPlayerMoments     ? res.errors.pi_sm
                    : t == kPlayerCovariance ? res.errors.pi_cov
                                             : res.errors.pi_ecdf;
  }
  return quo;
}

ReductionDiagnostics diagnose(const ScenarioSet& reduced, double prob_min,
                              double tol) {
  reduced.validate();
  ReductionDiagnostics d;
  const int k = reduced.num_scenarios();
  const int np = reduced.num_params();
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      bool same = true;
      for (int i = 0; i < np && same; ++i)
        same = reduced.values[i][a] == reduced.values[i][b];
      if (same) d.duplicates.push_back({a, b});
    }
  for (int j = 0; j < k; ++j) {
    d.smallest_prob = std::min(d.smallest_prob, reduced.prob[j]);
    if (reduced.prob[j] < prob_min - tol) d.below_prob_min++;
  }
  return d;
}

}  // namespace scengen
