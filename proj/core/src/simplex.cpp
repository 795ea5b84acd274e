// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#if defined(SCENGEN_HAVE_LAPACK)
extern "C" {
void dgetrf_(const int* m, const int* n, double* a, const int* lda, int* ipiv,
             int* info);
void dgetri_(const int* n, double* a, const int* lda, const int* ipiv,
             double* work, const int* lwork, int* info);
}
#endif

namespace scengen {

// TEMP diag counters
std::int64_t g_iters_phase1 = 0;
std::int64_t g_iters_phase2 = 0;
std::int64_t g_iters_dual = 0;
std::int64_t g_refactors = 0;
std::int64_t g_repairs = 0;
std::int64_t g_flips = 0;
std::int64_t g_dual_calls = 0;
std::int64_t g_stall_pivots = 0;

namespace {

constexpr double kSingularTol = 1e-11;
constexpr double kDegenerateStep = 1e-11;

// Power-of-two factor bringing max_abs into [0.5, 1); exact in binary FP.
double pow2_scale(double max_abs) {
  if (!(max_abs > 0.0) || !std::isfinite(max_abs)) return 1.0;
  int e = 0;
  std::frexp(max_abs, &e);
  return std::ldexp(1.0, -e);
}

}  // namespace

void Simplex::logical_bounds(Relation rel, double* lo, double* hi) const {
  switch (rel) {
    case Relation::kLessEqual:
      *lo = 0.0;
      *hi = kInfinity;
      break;
    case Relation::kGreaterEqual:
      *lo = -kInfinity;
      *hi = 0.0;
      break;
    case Relation::kEqual:
      *lo = 0.0;
      *hi = 0.0;
      break;
  }
}

void Simplex::load(const std::vector<double>& lower,
                   const std::vector<double>& upper,
                   const std::vector<double>& cost,
                   const std::vector<RowSpec>& rows, double pivot_tol) {
  n_ = static_cast<int>(lower.size());
  m_ = static_cast<int>(rows.size());
  pivot_tol_ = std::max(pivot_tol, 1e-12);
  feas_tol_ = std::max(1e-9, pivot_tol);
  dual_tol_ = std::max(1e-9, pivot_tol);

  row_scale_.assign(m_, 1.0);
  for (int i = 0; i < m_; ++i) {
    double mx = 0.0;
    for (const LinearTerm& t : rows[i].terms) mx = std::max(mx, std::abs(t.coef));
    row_scale_[i] = pow2_scale(mx);
  }
  col_scale_.assign(n_, 1.0);
  {
    std::vector<double> colmax(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      for (const LinearTerm& t : rows[i].terms) {
        colmax[t.var] =
            std::max(colmax[t.var], std::abs(t.coef) * row_scale_[i]);
      }
    }
    for (int j = 0; j < n_; ++j) col_scale_[j] = pow2_scale(colmax[j]);
  }

  cols_.assign(n_, {});
  rhs_.assign(m_, 0.0);
  rel_.assign(m_, Relation::kLessEqual);
  for (int i = 0; i < m_; ++i) {
    for (const LinearTerm& t : rows[i].terms) {
      const double a = t.coef * row_scale_[i] * col_scale_[t.var];
      if (a != 0.0) cols_[t.var].push_back({i, a});
    }
    rhs_[i] = rows[i].rhs * row_scale_[i];
    rel_[i] = rows[i].rel;
  }

  lb_.assign(total(), 0.0);
  ub_.assign(total(), 0.0);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lower[j] / col_scale_[j];
    ub_[j] = upper[j] / col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) logical_bounds(rel_[i], &lb_[n_ + i], &ub_[n_ + i]);

  set_cost(cost);
  set_cold_basis();
}

void Simplex::set_cost(const std::vector<double>& cost) {
  cost_.assign(total(), 0.0);
  double mx = 0.0;
  for (int j = 0; j < n_; ++j) mx = std::max(mx, std::abs(cost[j] * col_scale_[j]));
  obj_scale_ = pow2_scale(mx);
  for (int j = 0; j < n_; ++j) cost_[j] = cost[j] * col_scale_[j] * obj_scale_;
}

void Simplex::set_bounds(int col, double lower, double upper) {
  lb_[col] = lower / col_scale_[col];
  ub_[col] = upper / col_scale_[col];
  if (status_[col] == ColStatus::kAtLower) {
    if (std::isfinite(lb_[col])) {
      xn_[col] = lb_[col];
    } else if (std::isfinite(ub_[col])) {
      status_[col] = ColStatus::kAtUpper;
      xn_[col] = ub_[col];
    } else {
      status_[col] = ColStatus::kFree;
      xn_[col] = 0.0;
    }
  } else if (status_[col] == ColStatus::kAtUpper) {
    if (std::isfinite(ub_[col])) {
      xn_[col] = ub_[col];
    } else if (std::isfinite(lb_[col])) {
      status_[col] = ColStatus::kAtLower;
      xn_[col] = lb_[col];
    } else {
      status_[col] = ColStatus::kFree;
      xn_[col] = 0.0;
    }
  }
}

void Simplex::add_rows(const std::vector<RowSpec>& rows) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return;
  const int m_old = m_;
  const int m_new = m_old + k;

  // New slack columns must keep the indices n_..n_+m-1 layout: logical of old
  // row i stays at n_+i, new logicals append at the end.
  std::vector<double> binv_new(static_cast<std::size_t>(m_new) * m_new, 0.0);
  for (int i = 0; i < m_old; ++i) {
    std::memcpy(&binv_new[static_cast<std::size_t>(i) * m_new],
                &binv_[static_cast<std::size_t>(i) * m_old],
                sizeof(double) * m_old);
  }

  rhs_.resize(m_new);
  rel_.resize(m_new);
  row_scale_.resize(m_new);
  lb_.resize(n_ + m_new);
  ub_.resize(n_ + m_new);
  cost_.resize(n_ + m_new, 0.0);
  status_.resize(n_ + m_new);
  xn_.resize(n_ + m_new, 0.0);
  head_.resize(m_new);
  xb_.resize(m_new, 0.0);

  std::vector<int> row_of_basic(n_, -1);
  for (int i = 0; i < m_old; ++i) {
    if (head_[i] < n_) row_of_basic[head_[i]] = i;
  }

  std::vector<double> vrow(m_old);
  for (int t = 0; t < k; ++t) {
    const int r = m_old + t;
    double mx = 0.0;
    for (const LinearTerm& lt : rows[t].terms) {
      mx = std::max(mx, std::abs(lt.coef) * col_scale_[lt.var]);
    }
    row_scale_[r] = pow2_scale(mx);
    rhs_[r] = rows[t].rhs * row_scale_[r];
    rel_[r] = rows[t].rel;
    logical_bounds(rel_[r], &lb_[n_ + r], &ub_[n_ + r]);

    // Coefficients of the new row on the current basic columns, old rows only.
    std::fill(vrow.begin(), vrow.end(), 0.0);
    for (const LinearTerm& lt : rows[t].terms) {
      const double a = lt.coef * row_scale_[r] * col_scale_[lt.var];
      if (a == 0.0) continue;
      cols_[lt.var].push_back({r, a});
      if (row_of_basic[lt.var] >= 0) vrow[row_of_basic[lt.var]] = a;
    }
    // Inverse of [[B,0],[V,I]] is [[B^-1,0],[-V B^-1, I]].
    double* out = &binv_new[static_cast<std::size_t>(r) * m_new];
    for (int i = 0; i < m_old; ++i) {
      const double f = vrow[i];
      if (f == 0.0) continue;
      const double* bi = &binv_new[static_cast<std::size_t>(i) * m_new];
      for (int c = 0; c < m_old; ++c) out[c] -= f * bi[c];
    }
    out[r] = 1.0;

    head_[r] = n_ + r;
    status_[n_ + r] = ColStatus::kBasic;
  }

  m_ = m_new;
  binv_.swap(binv_new);
  binvt_.assign(binv_.size(), 0.0);
  for (int i = 0; i < m_; ++i) {
    for (int c = 0; c < m_; ++c) {
      binvt_[static_cast<std::size_t>(c) * m_ + i] =
          binv_[static_cast<std::size_t>(i) * m_ + c];
    }
  }
  compute_xb();
}

void Simplex::set_cold_basis() {
  status_.assign(total(), ColStatus::kAtLower);
  xn_.assign(total(), 0.0);
  for (int j = 0; j < total(); ++j) {
    if (std::isfinite(lb_[j])) {
      status_[j] = ColStatus::kAtLower;
      xn_[j] = lb_[j];
    } else if (std::isfinite(ub_[j])) {
      status_[j] = ColStatus::kAtUpper;
      xn_[j] = ub_[j];
    } else {
      status_[j] = ColStatus::kFree;
      xn_[j] = 0.0;
    }
  }
  head_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    status_[n_ + i] = ColStatus::kBasic;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  binvt_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    binvt_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
  }
  updates_since_refactor_ = 0;
  compute_xb();
}

Basis Simplex::basis() const { return Basis{status_, head_}; }

void Simplex::install_basis(const Basis& basis) {
  status_ = basis.status;
  head_ = basis.head;
  for (int j = 0; j < total(); ++j) {
    if (status_[j] == ColStatus::kBasic) continue;
    switch (status_[j]) {
      case ColStatus::kAtLower:
        xn_[j] = std::isfinite(lb_[j]) ? lb_[j] : 0.0;
        break;
      case ColStatus::kAtUpper:
        xn_[j] = std::isfinite(ub_[j]) ? ub_[j] : 0.0;
        break;
      default:
        xn_[j] = 0.0;
        break;
    }
  }
  refactor();
  compute_xb();
}

double Simplex::col_value(int col) const {
  if (status_[col] == ColStatus::kBasic) {
    for (int i = 0; i < m_; ++i) {
      if (head_[i] == col) return xb_[i];
    }
    return 0.0;
  }
  return xn_[col];
}

void Simplex::ftran(int col, std::vector<double>& w) const {
  w.assign(m_, 0.0);
  if (col >= n_) {
    const double* src = &binvt_[static_cast<std::size_t>(col - n_) * m_];
    std::copy(src, src + m_, w.begin());
    return;
  }
  for (const auto& [row, val] : cols_[col]) {
    const double* src = &binvt_[static_cast<std::size_t>(row) * m_];
    for (int i = 0; i < m_; ++i) w[i] += val * src[i];
  }
}

void Simplex::btran_dense(const std::vector<double>& cb,
                          std::vector<double>& y) const {
  y.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double f = cb[i];
    if (f == 0.0) continue;
    const double* src = &binv_[static_cast<std::size_t>(i) * m_];
    for (int c = 0; c < m_; ++c) y[c] += f * src[c];
  }
}

double Simplex::dot_col(int col, const std::vector<double>& y) const {
  if (col >= n_) return y[col - n_];
  double a = 0.0;
  for (const auto& [row, val] : cols_[col]) a += val * y[row];
  return a;
}

void Simplex::compute_xb() {
  std::vector<double>& r = work_c_;
  r = rhs_;
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == ColStatus::kBasic || xn_[j] == 0.0) continue;
    const double xv = xn_[j];
    for (const auto& [row, val] : cols_[j]) r[row] -= val * xv;
  }
  // Nonbasic logicals always sit at zero, so they never contribute.
  xb_.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
    double acc = 0.0;
    for (int c = 0; c < m_; ++c) acc += bi[c] * r[c];
    xb_[i] = acc;
  }
}

void Simplex::update_inverse(int leave_row, const std::vector<double>& w) {
  const double piv = w[leave_row];
  const double inv_piv = 1.0 / piv;
  double* br = &binv_[static_cast<std::size_t>(leave_row) * m_];
  for (int c = 0; c < m_; ++c) br[c] *= inv_piv;
  for (int i = 0; i < m_; ++i) {
    if (i == leave_row) continue;
    const double f = w[i];
    if (f == 0.0) continue;
    double* bi = &binv_[static_cast<std::size_t>(i) * m_];
    for (int c = 0; c < m_; ++c) bi[c] -= f * br[c];
  }
  for (int k = 0; k < m_; ++k) {
    double* tk = &binvt_[static_cast<std::size_t>(k) * m_];
    const double tr = tk[leave_row] * inv_piv;
    if (tr != 0.0) {
      for (int i = 0; i < m_; ++i) tk[i] -= w[i] * tr;
      tk[leave_row] = tr;
    }
  }
  ++updates_since_refactor_;
}

void Simplex::refactor() {
  ++g_refactors;
  std::vector<double> bmat(static_cast<std::size_t>(m_) * m_, 0.0);
  auto fill_col = [&](int k) {
    const int col = head_[k];
    if (col >= n_) {
      bmat[static_cast<std::size_t>(col - n_) * m_ + k] = 1.0;
    } else {
      for (const auto& [row, val] : cols_[col]) {
        bmat[static_cast<std::size_t>(row) * m_ + k] = val;
      }
    }
  };
  for (int k = 0; k < m_; ++k) fill_col(k);

#if defined(SCENGEN_HAVE_LAPACK)
  if (try_lapack_inverse(bmat)) {
    for (int i = 0; i < m_; ++i) {
      for (int c = 0; c < m_; ++c) {
        binvt_[static_cast<std::size_t>(c) * m_ + i] =
            binv_[static_cast<std::size_t>(i) * m_ + c];
      }
    }
    updates_since_refactor_ = 0;
    return;
  }
#endif

  // Gauss-Jordan on [B | I] with partial pivoting. When a basis column turns
  // out dependent, the best-conditioned nonbasic slack replaces it in place
  // (its transformed column is the corresponding column of the accumulated
  // inverse), so the factorization finishes in a single pass.
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;

  for (int k = 0; k < m_; ++k) {
    int piv_row = -1;
    double piv_val = kSingularTol;
    for (int i = k; i < m_; ++i) {
      const double v = std::abs(bmat[static_cast<std::size_t>(i) * m_ + k]);
      if (v > piv_val) {
        piv_val = v;
        piv_row = i;
      }
    }
    if (piv_row < 0) {
      int best_logical = -1;
      double best_score = kSingularTol;
      for (int r = 0; r < m_; ++r) {
        if (status_[n_ + r] == ColStatus::kBasic) continue;
        double score = 0.0;
        for (int i = k; i < m_; ++i) {
          score = std::max(score,
                           std::abs(binv_[static_cast<std::size_t>(i) * m_ + r]));
        }
        if (score > best_score) {
          best_score = score;
          best_logical = r;
        }
      }
      if (best_logical < 0) {
        throw SingularBasisError(
            "basis numerically singular and no slack can repair it at basis "
            "position " + std::to_string(k), k);
      }
      ++g_repairs;
      const int out_col = head_[k];
      if (std::isfinite(lb_[out_col])) {
        status_[out_col] = ColStatus::kAtLower;
        xn_[out_col] = lb_[out_col];
      } else if (std::isfinite(ub_[out_col])) {
        status_[out_col] = ColStatus::kAtUpper;
        xn_[out_col] = ub_[out_col];
      } else {
        status_[out_col] = ColStatus::kFree;
        xn_[out_col] = 0.0;
      }
      head_[k] = n_ + best_logical;
      status_[n_ + best_logical] = ColStatus::kBasic;
      for (int i = 0; i < m_; ++i) {
        bmat[static_cast<std::size_t>(i) * m_ + k] =
            binv_[static_cast<std::size_t>(i) * m_ + best_logical];
      }
      --k;
      continue;
    }
    if (piv_row != k) {
      for (int c = 0; c < m_; ++c) {
        std::swap(bmat[static_cast<std::size_t>(piv_row) * m_ + c],
                  bmat[static_cast<std::size_t>(k) * m_ + c]);
        std::swap(binv_[static_cast<std::size_t>(piv_row) * m_ + c],
                  binv_[static_cast<std::size_t>(k) * m_ + c]);
      }
    }
    const double inv_piv = 1.0 / bmat[static_cast<std::size_t>(k) * m_ + k];
    double* bk = &bmat[static_cast<std::size_t>(k) * m_];
    double* ik = &binv_[static_cast<std::size_t>(k) * m_];
    for (int c = 0; c < m_; ++c) {
      bk[c] *= inv_piv;
      ik[c] *= inv_piv;
    }
    for (int i = 0; i < m_; ++i) {
      if (i == k) continue;
      const double f = bmat[static_cast<std::size_t>(i) * m_ + k];
      if (f == 0.0) continue;
      double* bi = &bmat[static_cast<std::size_t>(i) * m_];
      double* ii = &binv_[static_cast<std::size_t>(i) * m_];
      for (int c = 0; c < m_; ++c) {
        bi[c] -= f * bk[c];
        ii[c] -= f * ik[c];
      }
    }
  }
  for (int i = 0; i < m_; ++i) {
    for (int c = 0; c < m_; ++c) {
      binvt_[static_cast<std::size_t>(c) * m_ + i] =
          binv_[static_cast<std::size_t>(i) * m_ + c];
    }
  }
  updates_since_refactor_ = 0;
}

#if defined(SCENGEN_HAVE_LAPACK)
bool Simplex::try_lapack_inverse(std::vector<double>& bmat) {
  // bmat holds B row-major, which LAPACK reads as B^T column-major; the
  // inverse of the transpose is the transpose of the inverse, so the result
  // is exactly B^-1 row-major. Factorize a copy: dgetrf overwrites its input,
  // and on failure the caller's fallback still needs the original matrix.
  std::vector<double> lu = bmat;
  std::vector<int> ipiv(m_);
  int info = 0;
  dgetrf_(&m_, &m_, lu.data(), &m_, ipiv.data(), &info);
  if (info != 0) return false;
  for (int i = 0; i < m_; ++i) {
    if (std::abs(lu[static_cast<std::size_t>(i) * m_ + i]) < kSingularTol) {
      return false;
    }
  }
  int lwork = 64 * m_;
  std::vector<double> work(lwork);
  dgetri_(&m_, lu.data(), &m_, ipiv.data(), work.data(), &lwork, &info);
  if (info != 0) return false;
  binv_ = std::move(lu);
  return true;
}
#endif

void Simplex::phase_costs(Phase phase, std::vector<double>& c) const {
  c.assign(total(), 0.0);
  if (phase == Phase::kTwo) {
    c = cost_;
    return;
  }
  for (int i = 0; i < m_; ++i) {
    const int b = head_[i];
    if (xb_[i] < lb_[b] - feas_tol_) {
      c[b] = -1.0;
    } else if (xb_[i] > ub_[b] + feas_tol_) {
      c[b] = 1.0;
    }
  }
}

int Simplex::count_infeasible() const {
  int count = 0;
  for (int i = 0; i < m_; ++i) {
    const int b = head_[i];
    if (xb_[i] < lb_[b] - feas_tol_ || xb_[i] > ub_[b] + feas_tol_) ++count;
  }
  return count;
}

double Simplex::infeasibility_sum() const {
  double sum = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int b = head_[i];
    sum += std::max(0.0, lb_[b] - xb_[i]);
    sum += std::max(0.0, xb_[i] - ub_[b]);
  }
  return sum;
}

double Simplex::primal_infeasibility() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int b = head_[i];
    worst = std::max(worst, lb_[b] - xb_[i]);
    worst = std::max(worst, xb_[i] - ub_[b]);
  }
  return worst;
}

LpStatus Simplex::primal_loop(Phase phase, std::int64_t max_iters) {
  int degen_run = 0;
  bool bland = false;
  std::vector<double> cb(m_);

  for (;;) {
    if (iterations_ >= max_iters) return LpStatus::kIterLimit;
    if (updates_since_refactor_ >= kRefactorInterval) {
      refactor();
      compute_xb();
    }
    if (phase == Phase::kOne && count_infeasible() == 0) return LpStatus::kOptimal;

    phase_costs(phase, work_c_);
    cb.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) cb[i] = work_c_[head_[i]];
    btran_dense(cb, work_y_);

    int q = -1;
    int tdir = 0;
    double best = dual_tol_;
    for (int j = 0; j < total(); ++j) {
      if (status_[j] == ColStatus::kBasic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed, can never move
      const double d = work_c_[j] - dot_col(j, work_y_);
      int dir = 0;
      double score = 0.0;
      switch (status_[j]) {
        case ColStatus::kAtLower:
          if (d < -dual_tol_) {
            dir = 1;
            score = -d;
          }
          break;
        case ColStatus::kAtUpper:
          if (d > dual_tol_) {
            dir = -1;
            score = d;
          }
          break;
        case ColStatus::kFree:
          if (std::abs(d) > dual_tol_) {
            dir = d < 0.0 ? 1 : -1;
            score = std::abs(d);
          }
          break;
        default:
          break;
      }
      if (dir == 0) continue;
      if (bland) {
        q = j;
        tdir = dir;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        tdir = dir;
      }
    }
    if (q < 0) {
      if (phase == Phase::kOne) {
        return count_infeasible() == 0 ? LpStatus::kOptimal : LpStatus::kInfeasible;
      }
      return LpStatus::kOptimal;
    }

    ftran(q, work_w_);

    // Ratio test. The entering variable moves by theta in direction tdir and
    // each basic value moves by -theta * tdir * w_i. In phase 1 an infeasible
    // basic variable blocks at its violated bound (it leaves feasible), while
    // variables moving deeper into infeasibility do not block; the composite
    // pricing already traded their deterioration off.
    double theta = kInfinity;
    int leave = -1;  // -2 means bound flip of the entering column
    double leave_to = 0.0;
    double best_piv = 0.0;
    const double range = ub_[q] - lb_[q];
    if (std::isfinite(range)) {
      theta = range;
      leave = -2;
    }
    for (int i = 0; i < m_; ++i) {
      const double w = work_w_[i];
      if (std::abs(w) <= pivot_tol_) continue;
      const double delta = tdir * w;
      const int b = head_[i];
      double cand;
      double bound;
      const bool below = phase == Phase::kOne && xb_[i] < lb_[b] - feas_tol_;
      const bool above = phase == Phase::kOne && xb_[i] > ub_[b] + feas_tol_;
      if (below) {
        if (delta >= 0.0) continue;
        cand = (xb_[i] - lb_[b]) / delta;
        bound = lb_[b];
      } else if (above) {
        if (delta <= 0.0) continue;
        cand = (xb_[i] - ub_[b]) / delta;
        bound = ub_[b];
      } else if (delta > 0.0) {
        if (!std::isfinite(lb_[b])) continue;
        cand = (xb_[i] - lb_[b]) / delta;
        bound = lb_[b];
      } else {
        if (!std::isfinite(ub_[b])) continue;
        cand = (xb_[i] - ub_[b]) / delta;
        bound = ub_[b];
      }
      if (cand < 0.0) cand = 0.0;
      bool take = false;
      if (cand < theta - 1e-12) {
        take = true;
      } else if (cand <= theta + 1e-12 && leave >= 0) {
        take = bland ? head_[i] < head_[leave] : std::abs(w) > best_piv;
      } else if (cand <= theta + 1e-12 && leave == -2) {
        take = false;  // prefer the cheap bound flip on ties
      }
      if (take) {
        theta = std::min(theta, std::max(cand, 0.0));
        leave = i;
        leave_to = bound;
        best_piv = std::abs(w);
      }
    }

    if (!std::isfinite(theta)) {
      if (phase == Phase::kOne) return LpStatus::kIterLimit;  // numerical stall
      return LpStatus::kUnbounded;
    }

    ++iterations_;
    (phase == Phase::kOne ? g_iters_phase1 : g_iters_phase2) += 1;
    const bool degenerate = theta <= kDegenerateStep;
    if (degenerate) {
      if (++degen_run > kDegeneratePivotsBeforeBland) bland = true;
    } else {
      degen_run = 0;
      bland = false;
    }

    if (leave == -2) {
      // Bound flip: no basis change.
      for (int i = 0; i < m_; ++i) xb_[i] -= theta * tdir * work_w_[i];
      if (tdir > 0) {
        status_[q] = ColStatus::kAtUpper;
        xn_[q] = ub_[q];
      } else {
        status_[q] = ColStatus::kAtLower;
        xn_[q] = lb_[q];
      }
      continue;
    }

    for (int i = 0; i < m_; ++i) xb_[i] -= theta * tdir * work_w_[i];
    const int lcol = head_[leave];
    status_[lcol] =
        leave_to == lb_[lcol] ? ColStatus::kAtLower : ColStatus::kAtUpper;
    xn_[lcol] = leave_to;
    const double enter_val = xn_[q] + tdir * theta;
    status_[q] = ColStatus::kBasic;
    head_[leave] = q;
    xb_[leave] = enter_val;
    update_inverse(leave, work_w_);
  }
}

bool Simplex::cleanup_and_verify(Phase phase) {
  (void)phase;
  compute_xb();
  if (primal_infeasibility() <= feas_tol_ * 16.0) return true;
  refactor();
  compute_xb();
  return false;
}

LpStatus Simplex::solve_primal(std::int64_t max_iters) {
  // The budget is per call: iterations_ accumulates over the instance
  // lifetime (warm chains included), so the cap must be relative to entry.
  const std::int64_t cap = iterations_ + max_iters;
  compute_xb();
  for (int round = 0; round < 6; ++round) {
    if (count_infeasible() > 0) {
      const LpStatus st = primal_loop(Phase::kOne, cap);
      if (st == LpStatus::kInfeasible) {
        // Re-derive the basic values once before certifying infeasibility.
        refactor();
        compute_xb();
        if (count_infeasible() > 0) {
          const LpStatus again = primal_loop(Phase::kOne, cap);
          if (again != LpStatus::kOptimal) return LpStatus::kInfeasible;
        }
      } else if (st != LpStatus::kOptimal) {
        return st;
      }
    }
    const LpStatus st = primal_loop(Phase::kTwo, cap);
    if (st == LpStatus::kOptimal) {
      if (cleanup_and_verify(Phase::kTwo)) return LpStatus::kOptimal;
      continue;  // drift detected, basis refreshed, resolve
    }
    return st;
  }
  return LpStatus::kIterLimit;
}

bool Simplex::make_dual_feasible() {
  phase_costs(Phase::kTwo, work_c_);
  std::vector<double> cb(m_);
  for (int i = 0; i < m_; ++i) cb[i] = work_c_[head_[i]];
  btran_dense(cb, work_y_);
  bool flipped = false;
  for (int j = 0; j < total(); ++j) {
    if (status_[j] == ColStatus::kBasic || lb_[j] == ub_[j]) continue;
    const double d = work_c_[j] - dot_col(j, work_y_);
    if (status_[j] == ColStatus::kAtLower && d < -dual_tol_) {
      if (!std::isfinite(ub_[j])) return false;
      status_[j] = ColStatus::kAtUpper;
      xn_[j] = ub_[j];
      flipped = true;
      ++g_flips;
    } else if (status_[j] == ColStatus::kAtUpper && d > dual_tol_) {
      if (!std::isfinite(lb_[j])) return false;
      status_[j] = ColStatus::kAtLower;
      xn_[j] = lb_[j];
      flipped = true;
      ++g_flips;
    } else if (status_[j] == ColStatus::kFree && std::abs(d) > dual_tol_) {
      return false;
    }
  }
  if (flipped) compute_xb();
  return true;
}

void Simplex::reset_dse() {
  dse_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * m_];
    double s = 0.0;
    for (int j = 0; j < m_; ++j) s += row[j] * row[j];
    dse_[i] = std::max(s, 1e-12);
  }
}

LpStatus Simplex::solve_dual(std::int64_t max_iters) {
  const std::int64_t cap = iterations_ + max_iters;
  ++g_dual_calls;
  // Bound edits on fixed columns leave their reduced costs unpoliced, so a
  // warm start after widening can violate the dual invariant; flip those
  // columns back before pivoting. A failure is fine: the finishing primal
  // call certifies whatever this loop reaches.
  make_dual_feasible();
  compute_xb();
  reset_dse();
  int stall_run = 0;
  bool bland = false;
  std::vector<double> cb(m_);
  std::vector<double> rho(m_);
  std::vector<double> kappa(m_);

  for (;;) {
    if (iterations_ >= cap) return LpStatus::kIterLimit;
    if (updates_since_refactor_ >= kRefactorInterval) {
      refactor();
      compute_xb();
      reset_dse();
    }

    // Leaving row by steepest edge: violation squared against the squared
    // norm of the inverse row. The anti-cycling fallback takes the smallest
    // index instead.
    int r = -1;
    bool below = false;
    double best_score = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int b = head_[i];
      const double v1 = lb_[b] - xb_[i];
      const double v2 = xb_[i] - ub_[b];
      const double viol = v1 > v2 ? v1 : v2;
      if (viol <= feas_tol_) continue;
      if (bland) {
        r = i;
        below = v1 > v2;
        break;
      }
      const double score = viol * viol / dse_[i];
      if (score > best_score) {
        best_score = score;
        r = i;
        below = v1 > v2;
      }
    }
    if (r < 0) {
      // Primal feasible; finish (and certify optimality) with phase 2.
      return solve_primal(max_iters);
    }

    phase_costs(Phase::kTwo, work_c_);
    cb.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) cb[i] = work_c_[head_[i]];
    btran_dense(cb, work_y_);
    const double* br = &binv_[static_cast<std::size_t>(r) * m_];
    rho.assign(br, br + m_);

    const double delta =
        below ? lb_[head_[r]] - xb_[r] : ub_[head_[r]] - xb_[r];

    int q = -1;
    int tq = 0;
    double best_ratio = kInfinity;
    double best_alpha = 0.0;
    for (int j = 0; j < total(); ++j) {
      if (status_[j] == ColStatus::kBasic || lb_[j] == ub_[j]) continue;
      const double alpha = dot_col(j, rho);
      if (std::abs(alpha) <= pivot_tol_) continue;
      int dir = 0;
      if (below) {
        if (status_[j] == ColStatus::kAtLower && alpha < 0.0) dir = 1;
        if (status_[j] == ColStatus::kAtUpper && alpha > 0.0) dir = -1;
        if (status_[j] == ColStatus::kFree) dir = alpha > 0.0 ? -1 : 1;
      } else {
        if (status_[j] == ColStatus::kAtLower && alpha > 0.0) dir = 1;
        if (status_[j] == ColStatus::kAtUpper && alpha < 0.0) dir = -1;
        if (status_[j] == ColStatus::kFree) dir = alpha > 0.0 ? 1 : -1;
      }
      if (dir == 0) continue;
      const double d = work_c_[j] - dot_col(j, work_y_);
      const double ratio = std::abs(d) / std::abs(alpha);
      bool take = false;
      if (bland) {
        // Smallest index among the minimal-ratio columns.
        take = q < 0 || ratio < best_ratio - 1e-12;
      } else if (ratio < best_ratio - 1e-12) {
        take = true;
      } else if (ratio <= best_ratio + 1e-12 && q >= 0) {
        take = std::abs(alpha) > best_alpha;
      }
      if (take) {
        best_ratio = ratio;
        best_alpha = std::abs(alpha);
        q = j;
        tq = dir;
      }
    }
    if (q < 0) {
      // The certificate that no column can repair row r is basis-relative;
      // distrust it while accumulated pivot updates could have drifted the
      // inverse, and recheck from a fresh factorization instead.
      if (updates_since_refactor_ > 0) {
        refactor();
        compute_xb();
        continue;
      }
      return LpStatus::kInfeasible;
    }

    ftran(q, work_w_);
    const double alpha_q = work_w_[r];
    if (std::abs(alpha_q) <= pivot_tol_) {
      refactor();
      compute_xb();
      reset_dse();
      continue;
    }
    // Dot products of the inverse rows with row r, taken before the pivot
    // rewrites the inverse; they make the edge-norm update below exact.
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      double s = 0.0;
      for (int j = 0; j < m_; ++j) s += row[j] * rho[j];
      kappa[i] = s;
    }
    double step = delta / (-tq * alpha_q);
    if (step < 0.0) step = 0.0;

    ++iterations_;
    ++g_iters_dual;
    // Stalls show up as a vanishing dual ratio, not a vanishing primal step.
    if (best_ratio <= 1e-10) {
      ++g_stall_pivots;
      if (++stall_run > kDegeneratePivotsBeforeBland / 4) bland = true;
    } else {
      stall_run = 0;
      bland = false;
    }

    for (int i = 0; i < m_; ++i) xb_[i] -= step * tq * work_w_[i];
    const int lcol = head_[r];
    if (below) {
      status_[lcol] = ColStatus::kAtLower;
      xn_[lcol] = lb_[lcol];
    } else {
      status_[lcol] = ColStatus::kAtUpper;
      xn_[lcol] = ub_[lcol];
    }
    const double enter_val = xn_[q] + tq * step;
    status_[q] = ColStatus::kBasic;
    head_[r] = q;
    xb_[r] = enter_val;
    update_inverse(r, work_w_);

    const double wr = dse_[r];
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double t = work_w_[i] / alpha_q;
      dse_[i] = std::max(dse_[i] - 2.0 * t * kappa[i] + t * t * wr, 1e-12);
    }
    dse_[r] = std::max(wr / (alpha_q * alpha_q), 1e-12);
  }
}

double Simplex::objective() const {
  double obj = 0.0;
  for (int i = 0; i < m_; ++i) obj += cost_[head_[i]] * xb_[i];
  for (int j = 0; j < total(); ++j) {
    if (status_[j] != ColStatus::kBasic && cost_[j] != 0.0) {
      obj += cost_[j] * xn_[j];
    }
  }
  return obj / obj_scale_;
}

std::vector<double> Simplex::solution() const {
  std::vector<double> x(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] != ColStatus::kBasic) x[j] = xn_[j] * col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    if (head_[i] < n_) x[head_[i]] = xb_[i] * col_scale_[head_[i]];
  }
  return x;
}

std::vector<double> Simplex::duals() const {
  std::vector<double> cb(m_, 0.0);
  for (int i = 0; i < m_; ++i) cb[i] = cost_[head_[i]];
  std::vector<double> y;
  btran_dense(cb, y);
  std::vector<double> out(m_, 0.0);
  for (int i = 0; i < m_; ++i) out[i] = y[i] * row_scale_[i] / obj_scale_;
  return out;
}

}  // namespace scengen
