// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace scengen {

int Model::add_var(const std::string& name, double lower, double upper,
                   VarKind kind) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidModelError("variable '" + name + "': empty bound interval");
  }
  if (kind == VarKind::kBinary && (lower < 0.0 || upper > 1.0)) {
    throw InvalidModelError("binary variable '" + name +
                            "': bounds must stay within [0,1]");
  }
  vars_.push_back(Variable{name, lower, upper, kind});
  obj_.push_back(0.0);
  return static_cast<int>(vars_.size()) - 1;
}

int Model::add_row(const std::string& name, std::vector<LinearTerm> terms,
                   Relation rel, double rhs, bool lazy) {
  std::unordered_set<int> seen;
  for (const LinearTerm& t : terms) {
    if (t.var < 0 || t.var >= num_vars()) {
      throw InvalidModelError("row '" + name +
                              "': coefficient references undeclared variable " +
                              std::to_string(t.var));
    }
    if (!seen.insert(t.var).second) {
      throw InvalidModelError("row '" + name + "': variable '" +
                              vars_[t.var].name + "' listed twice");
    }
    if (!std::isfinite(t.coef)) {
      throw InvalidModelError("row '" + name + "': non-finite coefficient");
    }
  }
  if (!std::isfinite(rhs)) {
    throw InvalidModelError("row '" + name + "': non-finite right-hand side");
  }
  rows_.push_back(RowDef{name, std::move(terms), rel, rhs, lazy});
  return static_cast<int>(rows_.size()) - 1;
}

void Model::set_objective_coef(int var, double coef) {
  if (var < 0 || var >= num_vars()) {
    throw InvalidModelError("objective references undeclared variable " +
                            std::to_string(var));
  }
  if (!std::isfinite(coef)) {
    throw InvalidModelError("objective coefficient for '" + vars_[var].name +
                            "' is not finite");
  }
  obj_[var] = coef;
}

void Model::set_var_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= num_vars()) {
    throw InvalidModelError("bounds reference undeclared variable " +
                            std::to_string(var));
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidModelError("variable '" + vars_[var].name +
                            "': empty bound interval");
  }
  vars_[var].lower = lower;
  vars_[var].upper = upper;
}

int Model::num_binaries() const {
  int count = 0;
  for (const Variable& v : vars_) {
    if (v.kind == VarKind::kBinary) ++count;
  }
  return count;
}

double Model::eval_row(int r, const std::vector<double>& x) const {
  double a = 0.0;
  for (const LinearTerm& t : rows_.at(r).terms) a += t.coef * x.at(t.var);
  return a;
}

double Model::eval_objective(const std::vector<double>& x) const {
  double a = 0.0;
  for (int j = 0; j < num_vars(); ++j) a += obj_[j] * x.at(j);
  return a;
}

double Model::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, vars_[j].lower - x[j]);
    worst = std::max(worst, x[j] - vars_[j].upper);
  }
  for (int r = 0; r < num_rows(); ++r) {
    const double a = eval_row(r, x);
    switch (rows_[r].rel) {
      case Relation::kLessEqual:
        worst = std::max(worst, a - rows_[r].rhs);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, rows_[r].rhs - a);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(a - rows_[r].rhs));
        break;
    }
  }
  return worst;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleGapMet:
      return "feasible-gap-met";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kTimeLimit:
      return "time-limit";
    case SolveStatus::kNodeLimit:
      return "node-limit";
  }
  return "unknown";
}

Model encode_sos2(Model model, const std::vector<int>& group) {
  const int g = static_cast<int>(group.size());
  if (g < 2) {
    throw InvalidModelError("sos2 group needs at least two members");
  }
  std::unordered_set<int> members(group.begin(), group.end());
  if (static_cast<int>(members.size()) != g) {
    throw InvalidModelError("sos2 group lists a variable twice");
  }
  for (const auto& prev : model.sos2_groups_) {
    for (int j : prev) {
      if (members.count(j)) {
        throw InvalidModelError("variable '" + model.var(j).name +
                                "' already belongs to an sos2 group");
      }
    }
  }
  for (int j : group) {
    if (j < 0 || j >= model.num_vars()) {
      throw InvalidModelError("sos2 group references undeclared variable " +
                              std::to_string(j));
    }
    const Variable& v = model.var(j);
    if (v.kind != VarKind::kContinuous || v.lower < 0.0 || v.upper > 1.0) {
      throw InvalidModelError("sos2 member '" + v.name +
                              "' must be continuous with bounds in [0,1]");
    }
  }

  const std::string tag = "sos2_" + std::to_string(model.sos2_groups_.size());
  std::vector<int> z(g - 1);
  for (int k = 0; k + 1 < g; ++k) {
    z[k] = model.add_binary(tag + "_z" + std::to_string(k));
  }
  std::vector<LinearTerm> one;
  for (int k = 0; k + 1 < g; ++k) one.push_back({z[k], 1.0});
  model.add_row(tag + "_pick", std::move(one), Relation::kEqual, 1.0);

  // Member g may be nonzero only when an adjacent pair covering it is active.
  for (int k = 0; k < g; ++k) {
    std::vector<LinearTerm> cover{{group[k], 1.0}};
    if (k > 0) cover.push_back({z[k - 1], -1.0});
    if (k + 1 < g) cover.push_back({z[k], -1.0});
    model.add_row(tag + "_cover" + std::to_string(k), std::move(cover),
                  Relation::kLessEqual, 0.0);
  }
  model.sos2_groups_.push_back(group);
  return model;
}

}  // namespace scengen
