// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_STATS_HPP_
#define SCENGEN_STATS_HPP_

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "scengen/scenario.hpp"

namespace scengen {

enum class Norm { kL1, kLinf };

const char* to_string(Norm norm);

// Matching targets of a scenario set. moments[i] holds the mean followed by
// the central moments of orders 2..4 (the denormalized form the matching
// rows consume); normalized skewness/kurtosis are carried for reporting only
// and are NaN when the variance vanishes. covariance is the full symmetric
// matrix with the variances on the diagonal. ecdf[i][n] is the probability
// mass at or below values[i][n].
struct StatSummary {
  std::vector<std::string> names;
  std::vector<std::array<double, 4>> moments;
  std::vector<double> skewness;
  std::vector<double> kurtosis;
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> ecdf;
  int sample_size = 0;

  // m in 1..4
  double moment(int i, int m) const { return moments[i][m - 1]; }

  // Degenerate parameters never have an exact zero variance once the
  // probabilities carry rounding (1/3 three times), so the flag fires when
  // the spread is below machine noise relative to the mean's scale.
  bool zero_variance(int i) const {
    double scale = std::max(1.0, moments[i][0] * moments[i][0]);
    return moments[i][1] <= 1e-24 * scale;
  }
};

StatSummary summarize(const ScenarioSet& set);

// Effective per-term weights of the matching objective. cov[i][i'] is used
// for i < i' only. guarded lists terms whose target magnitude was below
// 1e-12, where the normalizing denominator was replaced by 1.
struct WeightTable {
  std::vector<std::array<double, 4>> sm;
  std::vector<std::vector<double>> cov;
  std::vector<double> ecdf;
  std::vector<std::string> guarded;
};

// All deviations of a reduced set from its matching target, and the three
// player errors pi (weighted sums for L1, weighted maxima for Linf).
struct ErrorReport {
  Norm norm = Norm::kL1;
  double pi_sm = 0.0;
  double pi_cov = 0.0;
  double pi_ecdf = 0.0;
  std::vector<std::array<double, 4>> dev_plus;   // [i][m-1]
  std::vector<std::array<double, 4>> dev_minus;
  std::vector<std::vector<double>> cov_plus;     // [i][i'], i < i'
  std::vector<std::vector<double>> cov_minus;
  std::vector<double> ecdf_max;                  // e_i
  std::vector<std::vector<double>> phi;          // [i][j], kept scenario j

  double total() const { return pi_sm + pi_cov + pi_ecdf; }
};

// Re-evaluates every deviation from scratch at a reduced set. selection[j]
// is the original index of kept scenario j; it ties each kept point to its
// ECDF level on the original sample. Summations run in the same order as
// summarize, so reducing a set to itself yields exact zeros.
ErrorReport recompute_errors(const StatSummary& target,
                             const ScenarioSet& reduced,
                             const std::vector<int>& selection,
                             const WeightTable& weights, Norm norm);

// Optimal transportation cost between two sets under the squared Euclidean
// ground cost, solved as an LP. Identical inputs short-circuit to exact 0.
double wasserstein(const ScenarioSet& a, const ScenarioSet& b);

std::string to_json(const StatSummary& summary);
StatSummary summary_from_json(const std::string& text);
std::string to_json(const ErrorReport& report);

}  // namespace scengen

#endif  // SCENGEN_STATS_HPP_
