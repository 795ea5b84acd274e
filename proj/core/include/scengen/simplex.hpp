// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_SIMPLEX_HPP_
#define SCENGEN_SIMPLEX_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

// Raised when the basis matrix stays numerically singular after the solver
// replaced dependent columns by slacks and refactorized.
class SingularBasisError : public ModelError {
 public:
  SingularBasisError(const std::string& what, int row)
      : ModelError(what), row(row) {}
  int row;
};

enum class ColStatus : unsigned char { kBasic, kAtLower, kAtUpper, kFree };

// Snapshot of a simplex basis, reusable to warm start a structurally
// identical LP (same rows/columns, arbitrary objective).
struct Basis {
  std::vector<ColStatus> status;  // per column, structural then logical
  std::vector<int> head;          // basic column per row
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

// Bounded-variable revised simplex over a sparse column store with a dense
// explicit basis inverse kept in both row- and column-major copies so FTRAN,
// BTRAN and the pivot update all run on contiguous memory. Rows can be
// appended after loading (lazy constraints, cutting planes); the inverse is
// extended in place without refactorizing.
//
// All internal data is scaled by power-of-two row/column equilibration
// factors, which keeps scaling exact in floating point. Public accessors
// speak the unscaled (model) space.
class Simplex {
 public:
  struct RowSpec {
    std::vector<LinearTerm> terms;
    Relation rel = Relation::kLessEqual;
    double rhs = 0.0;
  };

  // Loads columns (bounds, costs) and rows. Costs are minimized.
  void load(const std::vector<double>& lower, const std::vector<double>& upper,
            const std::vector<double>& cost, const std::vector<RowSpec>& rows,
            double pivot_tol);

  // Replaces the objective, keeping matrix, bounds and basis.
  void set_cost(const std::vector<double>& cost);
  // Tightens or restores bounds of a structural column (model space).
  void set_bounds(int col, double lower, double upper);
  // Appends rows; their slacks enter the basis, so the current basis stays
  // valid and dual feasible.
  void add_rows(const std::vector<RowSpec>& rows);

  // Primal simplex from the current basis: composite phase 1, then phase 2.
  LpStatus solve_primal(std::int64_t max_iters = kDefaultIterLimit);
  // Dual simplex from the current basis. Requires dual-feasible reduced
  // costs; returns false from make_dual_feasible when bound flips cannot
  // repair them (caller falls back to solve_primal).
  LpStatus solve_dual(std::int64_t max_iters = kDefaultIterLimit);
  bool make_dual_feasible();

  void set_cold_basis();
  Basis basis() const;
  void install_basis(const Basis& basis);

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }
  std::int64_t iterations() const { return iterations_; }

  double objective() const;
  // Structural solution, unscaled.
  std::vector<double> solution() const;
  // Row duals y with reduced costs c - y'A; unscaled, minimization sense.
  std::vector<double> duals() const;
  double primal_infeasibility() const;

  static constexpr std::int64_t kDefaultIterLimit = 2'000'000;

 private:
  enum class Phase { kOne, kTwo };

  int total() const { return n_ + m_; }
  bool is_basic(int col) const { return status_[col] == ColStatus::kBasic; }
  double col_value(int col) const;
  double lower_of(int col) const { return lb_[col]; }
  double upper_of(int col) const { return ub_[col]; }

  void ftran(int col, std::vector<double>& w) const;
  void btran_dense(const std::vector<double>& c, std::vector<double>& y) const;
  double dot_col(int col, const std::vector<double>& y) const;
  void compute_xb();
  void refactor();
  bool try_lapack_inverse(std::vector<double>& bmat);
  void update_inverse(int leave_row, const std::vector<double>& w);

  void phase_costs(Phase phase, std::vector<double>& c) const;
  double infeasibility_sum() const;
  int count_infeasible() const;

  LpStatus primal_loop(Phase phase, std::int64_t max_iters);
  bool cleanup_and_verify(Phase phase);
  void reset_dse();

  // Logical column bounds from the row relation, row scale applied.
  void logical_bounds(Relation rel, double* lo, double* hi) const;

  int n_ = 0;  // structural columns
  int m_ = 0;  // rows
  std::vector<std::vector<std::pair<int, double>>> cols_;  // scaled, structural
  std::vector<double> rhs_;                                // scaled
  std::vector<Relation> rel_;
  std::vector<double> lb_, ub_;    // scaled, structural then logical
  std::vector<double> cost_;      // scaled, structural then logical (0)
  std::vector<double> col_scale_, row_scale_;
  double obj_scale_ = 1.0;

  std::vector<ColStatus> status_;
  std::vector<int> head_;
  std::vector<double> xb_;      // basic values by row
  std::vector<double> xn_;      // nonbasic values by column
  std::vector<double> binv_;    // row-major m*m
  std::vector<double> binvt_;   // row-major transpose copy
  std::vector<double> dse_;     // squared norms of the rows of binv_

  double pivot_tol_ = 1e-9;
  double feas_tol_ = 1e-9;
  double dual_tol_ = 1e-9;

  std::int64_t iterations_ = 0;
  int updates_since_refactor_ = 0;
  static constexpr int kRefactorInterval = 384;
  static constexpr int kDegeneratePivotsBeforeBland = 1000;

  std::vector<double> work_w_, work_y_, work_c_;
};

}  // namespace scengen

#endif  // SCENGEN_SIMPLEX_HPP_
