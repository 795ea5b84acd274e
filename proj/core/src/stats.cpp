// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "scengen/milp.hpp"
#include "scengen/model.hpp"

namespace scengen {
namespace {

// The four helpers below are the only summation kernels used by both
// summarize and recompute_errors. Sharing them (and their left-to-right
// order) makes reducing a set to itself produce deviations of exactly 0.

double dot_mass(const std::vector<double>& x, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * p[n];
  return s;
}

double central_sum(const std::vector<double>& x, const std::vector<double>& p,
                   double mean, int order) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    double d = x[n] - mean;
    double term = d;
    for (int m = 1; m < order; ++m) term *= d;
    s += term * p[n];
  }
  return s;
}

double cross_sum(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& p, double mean_a, double mean_b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    s += (a[n] - mean_a) * (b[n] - mean_b) * p[n];
  return s;
}

double mass_at_or_below(const std::vector<double>& x,
                        const std::vector<double>& p, double t) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n)
    if (x[n] <= t) s += p[n];
  return s;
}

void split_deviation(double net, double* plus, double* minus) {
  *plus = net > 0.0 ? net : 0.0;
  *minus = net < 0.0 ? -net : 0.0;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

const char* to_string(Norm norm) {
  return norm == Norm::kL1 ? "L1" : "Linf";
}

StatSummary summarize(const ScenarioSet& set) {
  set.validate();
  int ni = set.num_params();
  StatSummary s;
  s.names = set.names;
  s.sample_size = set.num_scenarios();
  s.moments.resize(ni);
  s.skewness.resize(ni);
  s.kurtosis.resize(ni);
  s.covariance.assign(ni, std::vector<double>(ni, 0.0));
  s.ecdf.resize(ni);
  for (int i = 0; i < ni; ++i) {
    const auto& row = set.values[i];
    double mean = dot_mass(row, set.prob);
    s.moments[i][0] = mean;
    for (int m = 2; m <= 4; ++m)
      s.moments[i][m - 1] = central_sum(row, set.prob, mean, m);
    double var = s.moments[i][1];
    if (!s.zero_variance(i)) {
      double sd = std::sqrt(var);
      s.skewness[i] = s.moments[i][2] / (sd * sd * sd);
      s.kurtosis[i] = s.moments[i][3] / (var * var);
    } else {
      s.skewness[i] = std::numeric_limits<double>::quiet_NaN();
      s.kurtosis[i] = std::numeric_limits<double>::quiet_NaN();
    }
    s.covariance[i][i] = var;
    s.ecdf[i].resize(row.size());
    for (std::size_t n = 0; n < row.size(); ++n)
      s.ecdf[i][n] = mass_at_or_below(row, set.prob, row[n]);
  }
  for (int i = 0; i < ni; ++i)
    for (int j = i + 1; j < ni; ++j) {
      double c = cross_sum(set.values[i], set.values[j], set.prob,
                           s.moments[i][0], s.moments[j][0]);
      s.covariance[i][j] = c;
      s.covariance[j][i] = c;
    }
  return s;
}

ErrorReport recompute_errors(const StatSummary& target,
                             const ScenarioSet& reduced,
                             const std::vector<int>& selection,
                             const WeightTable& weights, Norm norm) {
  reduced.validate();
  int ni = static_cast<int>(target.names.size());
  int nk = reduced.num_scenarios();
  if (reduced.num_params() != ni || reduced.names != target.names)
    throw DataError("reduced set parameters do not match the target");
  if (static_cast<int>(selection.size()) != nk)
    throw DataError("selection map length does not match the reduced set");
  for (int sel : selection)
    if (sel < 0 || sel >= target.sample_size)
      throw DataError("selection references unknown original index " +
                      std::to_string(sel));
  if (static_cast<int>(weights.sm.size()) != ni ||
      static_cast<int>(weights.cov.size()) != ni ||
      static_cast<int>(weights.ecdf.size()) != ni)
    throw DataError("weight table size does not match the target");

  ErrorReport rep;
  rep.norm = norm;
  rep.dev_plus.assign(ni, {});
  rep.dev_minus.assign(ni, {});
  rep.cov_plus.assign(ni, std::vector<double>(ni, 0.0));
  rep.cov_minus.assign(ni, std::vector<double>(ni, 0.0));
  rep.ecdf_max.assign(ni, 0.0);
  rep.phi.assign(ni, std::vector<double>(nk, 0.0));

  for (int i = 0; i < ni; ++i) {
    const auto& row = reduced.values[i];
    double mean = target.moment(i, 1);
    split_deviation(target.moment(i, 1) - dot_mass(row, reduced.prob),
                    &rep.dev_plus[i][0], &rep.dev_minus[i][0]);
    for (int m = 2; m <= 4; ++m)
      split_deviation(
          target.moment(i, m) - central_sum(row, reduced.prob, mean, m),
          &rep.dev_plus[i][m - 1], &rep.dev_minus[i][m - 1]);
    for (int j = 0; j < nk; ++j) {
      double phi = target.ecdf[i][selection[j]] -
                   mass_at_or_below(row, reduced.prob, row[j]);
      rep.phi[i][j] = phi;
      rep.ecdf_max[i] = std::max(rep.ecdf_max[i], std::abs(phi));
    }
  }
  for (int i = 0; i < ni; ++i)
    for (int j = i + 1; j < ni; ++j)
      split_deviation(
          target.covariance[i][j] -
              cross_sum(reduced.values[i], reduced.values[j], reduced.prob,
                        target.moment(i, 1), target.moment(j, 1)),
          &rep.cov_plus[i][j], &rep.cov_minus[i][j]);

  if (norm == Norm::kL1) {
    for (int i = 0; i < ni; ++i) {
      for (int m = 0; m < 4; ++m)
        rep.pi_sm += weights.sm[i][m] * (rep.dev_plus[i][m] +
                                         rep.dev_minus[i][m]);
      for (int j = i + 1; j < ni; ++j)
        rep.pi_cov += weights.cov[i][j] * (rep.cov_plus[i][j] +
                                           rep.cov_minus[i][j]);
      rep.pi_ecdf += weights.ecdf[i] * rep.ecdf_max[i];
    }
  } else {
    for (int i = 0; i < ni; ++i) {
      for (int m = 0; m < 4; ++m)
        rep.pi_sm = std::max(rep.pi_sm,
                             weights.sm[i][m] * (rep.dev_plus[i][m] +
                                                 rep.dev_minus[i][m]));
      for (int j = i + 1; j < ni; ++j)
        rep.pi_cov = std::max(rep.pi_cov,
                              weights.cov[i][j] * (rep.cov_plus[i][j] +
                                                   rep.cov_minus[i][j]));
      rep.pi_ecdf = std::max(rep.pi_ecdf,
                             weights.ecdf[i] * rep.ecdf_max[i]);
    }
  }
  return rep;
}

double wasserstein(const ScenarioSet& a, const ScenarioSet& b) {
  a.validate();
  b.validate();
  if (a.names != b.names)
    throw DataError("transportation distance needs a shared parameter space");
  if (a.values == b.values && a.prob == b.prob) return 0.0;

  int na = a.num_scenarios();
  int nb = b.num_scenarios();
  Model model;
  for (int n = 0; n < na; ++n)
    for (int k = 0; k < nb; ++k) {
      int var = model.add_continuous(
          "t_" + std::to_string(n) + "_" + std::to_string(k), 0.0, kInfinity);
      double cost = 0.0;
      for (int i = 0; i < a.num_params(); ++i) {
        double d = a.values[i][n] - b.values[i][k];
        cost += d * d;
      }
      model.set_objective_coef(var, cost);
    }
  for (int n = 0; n < na; ++n) {
    std::vector<LinearTerm> terms;
    for (int k = 0; k < nb; ++k) terms.push_back({n * nb + k, 1.0});
    model.add_row("src_" + std::to_string(n), std::move(terms),
                  Relation::kEqual, a.prob[n]);
  }
  for (int k = 0; k < nb; ++k) {
    std::vector<LinearTerm> terms;
    for (int n = 0; n < na; ++n) terms.push_back({n * nb + k, 1.0});
    model.add_row("dst_" + std::to_string(k), std::move(terms),
                  Relation::kEqual, b.prob[k]);
  }
  Solution sol = solve_lp(model);
  if (sol.status != SolveStatus::kOptimal)
    throw DataError(std::string("transport LP ended ") +
                    to_string(sol.status));
  return sol.objective > 0.0 ? sol.objective : 0.0;
}

std::string to_json(const StatSummary& summary) {
  nlohmann::json doc;
  doc["sample_size"] = summary.sample_size;
  doc["parameters"] = summary.names;
  nlohmann::json moments = nlohmann::json::array();
  for (std::size_t i = 0; i < summary.names.size(); ++i) {
    nlohmann::json m;
    m["mean"] = summary.moments[i][0];
    m["m2"] = summary.moments[i][1];
    m["m3"] = summary.moments[i][2];
    m["m4"] = summary.moments[i][3];
    m["skewness"] = finite_or_null(summary.skewness[i]);
    m["kurtosis"] = finite_or_null(summary.kurtosis[i]);
    moments.push_back(std::move(m));
  }
  doc["moments"] = std::move(moments);
  doc["covariance"] = summary.covariance;
  doc["ecdf"] = summary.ecdf;
  return doc.dump(2) + "\n";
}

StatSummary summary_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad summary document: ") + e.what());
  }
  StatSummary s;
  try {
    s.sample_size = doc.at("sample_size").get<int>();
    s.names = doc.at("parameters").get<std::vector<std::string>>();
    for (const auto& m : doc.at("moments")) {
      std::array<double, 4> d = {m.at("mean").get<double>(),
                                 m.at("m2").get<double>(),
                                 m.at("m3").get<double>(),
                                 m.at("m4").get<double>()};
      s.moments.push_back(d);
      auto opt = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                           : v.get<double>();
      };
      s.skewness.push_back(opt(m.at("skewness")));
      s.kurtosis.push_back(opt(m.at("kurtosis")));
    }
    s.covariance = doc.at("covariance").get<std::vector<std::vector<double>>>();
    s.ecdf = doc.at("ecdf").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad summary document: ") + e.what());
  }
  if (s.moments.size() != s.names.size() ||
      s.covariance.size() != s.names.size() ||
      s.ecdf.size() != s.names.size())
    throw DataError("summary document sections disagree on parameter count");
  return s;
}

std::string to_json(const ErrorReport& report) {
  nlohmann::json err;
  err["pi"] = {{"SM", report.pi_sm},
               {"COV", report.pi_cov},
               {"ECDF", report.pi_ecdf}};
  err["moment_plus"] = report.dev_plus;
  err["moment_minus"] = report.dev_minus;
  err["covariance_plus"] = report.cov_plus;
  err["covariance_minus"] = report.cov_minus;
  err["ecdf_max"] = report.ecdf_max;
  err["phi"] = report.phi;
  nlohmann::json doc;
  doc["norm"] = to_string(report.norm);
  doc["errors"] = std::move(err);
  return doc.dump(2) + "\n";
}

}  // namespace scengen
