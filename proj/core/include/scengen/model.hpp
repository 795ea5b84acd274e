// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_MODEL_HPP_
#define SCENGEN_MODEL_HPP_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace scengen {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { kContinuous, kBinary };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class ObjSense { kMinimize, kMaximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarKind kind = VarKind::kContinuous;
};

struct LinearTerm {
  int var = -1;
  double coef = 0.0;
};

// One linear row. Rows flagged lazy are enforced at integer candidates only;
// the branch-and-bound activates them on violation, so reported solutions
// always satisfy them while node relaxations stay small.
struct RowDef {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation rel = Relation::kLessEqual;
  double rhs = 0.0;
  bool lazy = false;
};

class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Input error raised when a coefficient references an undeclared variable,
// binary bounds leave [0,1], or an SOS2 group is malformed.
class InvalidModelError : public ModelError {
 public:
  using ModelError::ModelError;
};

class Model {
 public:
  int add_var(const std::string& name, double lower, double upper,
              VarKind kind = VarKind::kContinuous);
  int add_continuous(const std::string& name, double lower, double upper) {
    return add_var(name, lower, upper, VarKind::kContinuous);
  }
  int add_binary(const std::string& name) {
    return add_var(name, 0.0, 1.0, VarKind::kBinary);
  }

  // Adds a linear row; terms may list a variable at most once.
  int add_row(const std::string& name, std::vector<LinearTerm> terms,
              Relation rel, double rhs, bool lazy = false);

  void set_sense(ObjSense sense) { sense_ = sense; }
  void set_objective_coef(int var, double coef);
  double objective_coef(int var) const { return obj_.at(var); }

  void set_var_bounds(int var, double lower, double upper);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;
  ObjSense sense() const { return sense_; }
  const Variable& var(int j) const { return vars_.at(j); }
  const RowDef& row(int r) const { return rows_.at(r); }
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<RowDef>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return obj_; }
  const std::vector<std::vector<int>>& sos2_groups() const {
    return sos2_groups_;
  }

  double eval_row(int r, const std::vector<double>& x) const;
  double eval_objective(const std::vector<double>& x) const;
  // Largest bound/row violation of a candidate point, lazy rows included.
  double max_violation(const std::vector<double>& x) const;

 private:
  friend Model encode_sos2(Model model, const std::vector<int>& group);

  std::vector<Variable> vars_;
  std::vector<RowDef> rows_;
  std::vector<double> obj_;
  ObjSense sense_ = ObjSense::kMinimize;
  std::vector<std::vector<int>> sos2_groups_;
};

struct SolveSettings {
  double rel_gap = 0.01;
  double time_limit_sec = 900.0;
  double integrality_tol = 1e-6;
  double pivot_tol = 1e-9;
  std::int64_t node_limit = 50'000'000;
};

enum class SolveStatus {
  kOptimal,
  kFeasibleGapMet,
  kInfeasible,
  kUnbounded,
  kTimeLimit,
  kNodeLimit,
};

const char* to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;       // empty when no feasible point was found
  std::vector<double> row_duals;    // LP solves only
  double rel_gap = 0.0;
  std::int64_t nodes = 0;
  std::int64_t iterations = 0;
  double wall_time_sec = 0.0;

  bool has_values() const { return !values.empty(); }
};

// Replaces an ordered SOS2 group (at most two adjacent members nonzero) by
// the standard binary encoding: one binary per adjacent pair, exactly one
// pair active, and each member bounded by the pairs covering it.
// Members must be continuous variables with bounds inside [0,1] and may
// belong to at most one group.
Model encode_sos2(Model model, const std::vector<int>& group);

}  // namespace scengen

#endif  // SCENGEN_MODEL_HPP_
