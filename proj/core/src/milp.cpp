// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include "scengen/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <queue>
#include <vector>

#include "scengen/simplex.hpp"

namespace scengen {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  return h * 1099511628211ULL;
}

std::uint64_t fnv_double(std::uint64_t h, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, sizeof(bits));
  return fnv_mix(h, bits);
}

}  // namespace

struct MilpSolver::Impl {
  Simplex spx;
  bool loaded = false;
  std::uint64_t structure_hash = 0;
  std::vector<int> lazy_pool;  // model row ids not yet in the relaxation

  std::uint64_t hash_structure(const Model& model) const {
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv_mix(h, static_cast<std::uint64_t>(model.num_vars()));
    h = fnv_mix(h, static_cast<std::uint64_t>(model.num_rows()));
    h = fnv_mix(h, model.sense() == ObjSense::kMaximize ? 1 : 0);
    for (const Variable& v : model.vars()) {
      h = fnv_double(h, v.lower);
      h = fnv_double(h, v.upper);
      h = fnv_mix(h, v.kind == VarKind::kBinary ? 7 : 3);
    }
    for (const RowDef& r : model.rows()) {
      h = fnv_mix(h, static_cast<std::uint64_t>(r.rel));
      h = fnv_double(h, r.rhs);
      h = fnv_mix(h, r.lazy ? 11 : 5);
      for (const LinearTerm& t : r.terms) {
        h = fnv_mix(h, static_cast<std::uint64_t>(t.var));
        h = fnv_double(h, t.coef);
      }
    }
    return h;
  }

  static std::vector<double> internal_cost(const Model& model) {
    std::vector<double> cost = model.objective();
    if (model.sense() == ObjSense::kMaximize) {
      for (double& c : cost) c = -c;
    }
    return cost;
  }

  void load_full(const Model& model, const SolveSettings& settings) {
    std::vector<double> lb(model.num_vars()), ub(model.num_vars());
    for (int j = 0; j < model.num_vars(); ++j) {
      lb[j] = model.var(j).lower;
      ub[j] = model.var(j).upper;
    }
    std::vector<Simplex::RowSpec> active;
    lazy_pool.clear();
    for (int r = 0; r < model.num_rows(); ++r) {
      const RowDef& row = model.row(r);
      if (row.lazy) {
        lazy_pool.push_back(r);
      } else {
        active.push_back({row.terms, row.rel, row.rhs});
      }
    }
    spx.load(lb, ub, internal_cost(model), active, settings.pivot_tol);
    structure_hash = hash_structure(model);
    loaded = true;
  }

  // Reuse path: same matrix, new objective. Bounds are reset to the model's
  // values (branching may have left node bounds installed).
  void rewind(const Model& model) {
    spx.set_cost(internal_cost(model));
    for (int j = 0; j < model.num_vars(); ++j) {
      spx.set_bounds(j, model.var(j).lower, model.var(j).upper);
    }
  }

  // Adds every not-yet-active lazy row violated at x; returns the count.
  int activate_violated(const Model& model, const std::vector<double>& x,
                        double tol) {
    std::vector<Simplex::RowSpec> batch;
    std::vector<int> keep;
    for (int rid : lazy_pool) {
      const RowDef& row = model.row(rid);
      const double a = model.eval_row(rid, x);
      bool violated = false;
      switch (row.rel) {
        case Relation::kLessEqual:
          violated = a > row.rhs + tol;
          break;
        case Relation::kGreaterEqual:
          violated = a < row.rhs - tol;
          break;
        case Relation::kEqual:
          violated = std::abs(a - row.rhs) > tol;
          break;
      }
      if (violated) {
        batch.push_back({row.terms, row.rel, row.rhs});
      } else {
        keep.push_back(rid);
      }
    }
    if (!batch.empty()) {
      spx.add_rows(batch);
      lazy_pool.swap(keep);
    }
    return static_cast<int>(batch.size());
  }

  Solution run(const Model& model, const SolveSettings& settings);
};

Solution MilpSolver::Impl::run(const Model& model,
                               const SolveSettings& settings) {
  const auto start = Clock::now();
  const std::int64_t iters_before = spx.iterations();

  const std::uint64_t h = hash_structure(model);
  bool warm = loaded && h == structure_hash;
  if (warm) {
    rewind(model);
  } else {
    load_full(model, settings);
  }

  Solution out;
  auto finish_lp_status = [&](LpStatus st) {
    switch (st) {
      case LpStatus::kInfeasible:
        out.status = SolveStatus::kInfeasible;
        break;
      case LpStatus::kUnbounded:
        out.status = SolveStatus::kUnbounded;
        break;
      default:
        out.status = SolveStatus::kTimeLimit;
        break;
    }
  };

  // Root relaxation plus lazy activation at the relaxed optimum.
  LpStatus st = spx.solve_primal();
  const double lazy_tol = 1e-7;
  for (int round = 0; round < 200 && st == LpStatus::kOptimal; ++round) {
    if (activate_violated(model, spx.solution(), lazy_tol) == 0) break;
    if (!spx.make_dual_feasible()) {
      st = spx.solve_primal();
    } else {
      st = spx.solve_dual();
    }
  }
  if (st != LpStatus::kOptimal) {
    finish_lp_status(st);
    out.iterations = spx.iterations() - iters_before;
    out.wall_time_sec = seconds_since(start);
    // A failed warm solve must not poison the next call.
    if (out.status == SolveStatus::kTimeLimit) loaded = false;
    return out;
  }

  std::vector<int> binaries;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.var(j).kind == VarKind::kBinary) binaries.push_back(j);
  }

  if (binaries.empty()) {
    out.status = SolveStatus::kOptimal;
    out.objective =
        model.sense() == ObjSense::kMaximize ? -spx.objective() : spx.objective();
    out.values = spx.solution();
    out.row_duals = spx.duals();
    if (model.sense() == ObjSense::kMaximize) {
      for (double& d : out.row_duals) d = -d;
    }
    out.iterations = spx.iterations() - iters_before;
    out.wall_time_sec = seconds_since(start);
    return out;
  }

  // Generalized-upper-bound groups: ordinary equality rows of the form
  // sum(y) = 1 over distinct binaries with unit coefficients. Branching on a
  // whole group splits its fractional mass instead of toggling one variable,
  // which actually moves the relaxation bound in partitioning structures.
  std::vector<std::vector<int>> gub;
  std::vector<int> group_of(model.num_vars(), -1);
  for (int r = 0; r < model.num_rows(); ++r) {
    const RowDef& row = model.row(r);
    if (row.lazy || row.rel != Relation::kEqual || row.rhs != 1.0) continue;
    if (row.terms.size() < 2) continue;
    bool fits = true;
    for (const LinearTerm& t : row.terms) {
      if (t.coef != 1.0 || model.var(t.var).kind != VarKind::kBinary ||
          group_of[t.var] >= 0) {
        fits = false;
        break;
      }
    }
    if (!fits) continue;
    const int g = static_cast<int>(gub.size());
    gub.emplace_back();
    for (const LinearTerm& t : row.terms) {
      gub[g].push_back(t.var);
      group_of[t.var] = g;
    }
  }

  // Branch and bound, everything in the internal minimization sense.
  struct Node {
    int parent = -1;
    int branch_var = -1;      // >= 0: single-variable dichotomy
    int branch_up = 0;        // 0: ub<-0, 1: lb<-1
    std::vector<int> zeros;   // group dichotomy: these get ub<-0
    double bound = -kInfinity;
  };
  std::vector<Node> nodes(1);
  nodes[0].bound = spx.objective();

  // Ties on the bound pop the newest node first, so equal-bound children are
  // explored depth-first and an incumbent appears early. The key is rounded
  // so solver noise cannot break a tie; exact bounds live in the nodes.
  auto quantize = [](double b) { return std::round(b * 1e7) / 1e7; };
  using HeapItem = std::pair<double, std::int64_t>;  // (rounded bound, -id)
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
  heap.push({quantize(nodes[0].bound), 0});

  double incumbent = kInfinity;
  std::vector<double> incumbent_x;
  double pruned_lb = kInfinity;  // tightest bound discarded by pruning
  std::int64_t processed = 0;
  SolveStatus stop_status = SolveStatus::kOptimal;
  bool stopped_early = false;

  std::vector<int> touched;

  auto prune_eps = [&]() {
    if (!std::isfinite(incumbent)) return 0.0;
    return std::max(1e-9 * std::max(1.0, std::abs(incumbent)),
                    settings.rel_gap * std::abs(incumbent));
  };

  // Rounding probe at the root: keep the heaviest member of every group,
  // round the loose binaries, and let the dual simplex settle the continuous
  // part. A clean candidate seeds the incumbent before any branching.
  {
    const std::vector<double> xr = spx.solution();
    std::vector<char> grouped(model.num_vars(), 0);
    auto fix = [&](int j, double v) {
      spx.set_bounds(j, v, v);
      touched.push_back(j);
    };
    for (const std::vector<int>& grp : gub) {
      int best = grp[0];
      for (int u : grp) {
        grouped[u] = 1;
        if (xr[u] > xr[best] + 1e-12) best = u;
      }
      for (int u : grp) fix(u, u == best ? 1.0 : 0.0);
    }
    for (int j : binaries) {
      if (!grouped[j]) fix(j, std::round(xr[j]));
    }
    LpStatus hst = spx.solve_dual();
    if (hst == LpStatus::kIterLimit) hst = spx.solve_primal();
    for (int round = 0; round < 200 && hst == LpStatus::kOptimal; ++round) {
      if (activate_violated(model, spx.solution(), lazy_tol) == 0) break;
      hst = spx.solve_dual();
      if (hst == LpStatus::kIterLimit) hst = spx.solve_primal();
    }
    if (hst == LpStatus::kOptimal) {
      incumbent = spx.objective();
      incumbent_x = spx.solution();
      for (int v : binaries) incumbent_x[v] = std::round(incumbent_x[v]);
    }
    for (int j : touched) {
      spx.set_bounds(j, model.var(j).lower, model.var(j).upper);
    }
    touched.clear();
  }

  std::vector<int> path;  // node ids from the root down

  auto apply_node = [&](int id) {
    for (int v : touched) {
      spx.set_bounds(v, model.var(v).lower, model.var(v).upper);
    }
    touched.clear();
    path.clear();
    for (int cur = id; cur > 0; cur = nodes[cur].parent) path.push_back(cur);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const Node& nd = nodes[*it];
      if (nd.branch_var >= 0) {
        if (nd.branch_up) {
          spx.set_bounds(nd.branch_var, 1.0, model.var(nd.branch_var).upper);
        } else {
          spx.set_bounds(nd.branch_var, model.var(nd.branch_var).lower, 0.0);
        }
        touched.push_back(nd.branch_var);
      } else {
        for (int v : nd.zeros) {
          spx.set_bounds(v, model.var(v).lower, 0.0);
          touched.push_back(v);
        }
      }
    }
  };

  while (!heap.empty()) {
    if (seconds_since(start) > settings.time_limit_sec) {
      stop_status = SolveStatus::kTimeLimit;
      stopped_early = true;
      break;
    }
    if (processed >= settings.node_limit) {
      stop_status = SolveStatus::kNodeLimit;
      stopped_early = true;
      break;
    }
    const std::int64_t key = heap.top().second;
    const int id = static_cast<int>(-key);
    const double bound = nodes[id].bound;
    heap.pop();
    if (std::isfinite(incumbent) && bound >= incumbent - prune_eps()) {
      pruned_lb = std::min(pruned_lb, bound);
      // Best-bound order: every remaining node is at least as bad.
      while (!heap.empty()) heap.pop();
      break;
    }

    apply_node(static_cast<int>(id));
    ++processed;
    LpStatus node_st = spx.solve_dual();
    if (node_st == LpStatus::kIterLimit) node_st = spx.solve_primal();
    if (node_st == LpStatus::kInfeasible) continue;
    if (node_st != LpStatus::kOptimal) {
      stop_status = SolveStatus::kTimeLimit;
      stopped_early = true;
      pruned_lb = std::min(pruned_lb, bound);  // subtree stays unexplored
      break;
    }

    double node_obj = spx.objective();
    double node_bound = std::max(bound, node_obj);
    if (std::isfinite(incumbent) && node_bound >= incumbent - prune_eps()) {
      pruned_lb = std::min(pruned_lb, node_bound);
      continue;
    }

    // Lazy activation loop at integer candidates.
    bool integral = true;
    int frac_var = -1;
    double frac_score = -1.0;
    std::vector<double> x;
    for (;;) {
      x = spx.solution();
      integral = true;
      frac_var = -1;
      frac_score = -1.0;
      for (int v : binaries) {
        const double f = std::abs(x[v] - std::round(x[v]));
        if (f > settings.integrality_tol) {
          integral = false;
          const double score = std::min(x[v] - std::floor(x[v]),
                                        std::ceil(x[v]) - x[v]);
          if (score > frac_score + 1e-15) {
            frac_score = score;
            frac_var = v;
          }
        }
      }
      if (!integral) break;
      if (activate_violated(model, x, lazy_tol) == 0) {
        // Clean integer candidate.
        if (node_obj < incumbent - 1e-12) {
          incumbent = node_obj;
          incumbent_x = std::move(x);
          for (int v : binaries) {
            incumbent_x[v] = std::round(incumbent_x[v]);
          }
        }
        break;
      }
      LpStatus lst = spx.solve_dual();
      if (lst == LpStatus::kIterLimit) lst = spx.solve_primal();
      if (lst == LpStatus::kInfeasible) {
        integral = true;  // node closed
        node_obj = kInfinity;
        break;
      }
      if (lst != LpStatus::kOptimal) {
        stop_status = SolveStatus::kTimeLimit;
        stopped_early = true;
        pruned_lb = std::min(pruned_lb, node_bound);
        break;
      }
      node_obj = spx.objective();
      node_bound = std::max(node_bound, node_obj);
      if (std::isfinite(incumbent) && node_bound >= incumbent - prune_eps()) {
        pruned_lb = std::min(pruned_lb, node_bound);
        integral = true;  // treated as closed
        break;
      }
    }
    if (stopped_early) break;
    if (integral) continue;

    // Branch. Children inherit the parent bound; the child pushed last is
    // popped first on a tie.
    auto push_child = [&](Node&& nd) {
      nodes.push_back(std::move(nd));
      heap.push(
          {quantize(node_bound), -(static_cast<std::int64_t>(nodes.size()) - 1)});
    };
    const int v = frac_var;
    const int g = group_of[v];
    if (g >= 0) {
      // Split the group where the accumulated fractional mass crosses one
      // half, clamped so both sides keep positive mass; each child zeroes
      // the other side, so both strictly shed support and paths stay finite.
      const std::vector<int>& grp = gub[g];
      double total = 0.0;
      int last_pos = 0;
      for (std::size_t t = 0; t < grp.size(); ++t) {
        const double m = x[grp[t]];
        total += m;
        if (m > 1e-9) last_pos = static_cast<int>(t);
      }
      double cum = 0.0;
      int split = static_cast<int>(grp.size()) - 2;
      for (std::size_t t = 0; t + 1 < grp.size(); ++t) {
        cum += x[grp[t]];
        if (cum >= 0.5 * total - 1e-12) {
          split = static_cast<int>(t);
          break;
        }
      }
      split = std::min(split, std::max(last_pos - 1, 0));
      std::vector<int> head(grp.begin(), grp.begin() + split + 1);
      std::vector<int> tail(grp.begin() + split + 1, grp.end());
      push_child({id, -1, 0, std::move(head), node_bound});
      push_child({id, -1, 0, std::move(tail), node_bound});
    } else {
      if (model.var(v).lower <= 0.0) {
        push_child({id, v, 0, {}, node_bound});
      }
      if (model.var(v).upper >= 1.0) {
        push_child({id, v, 1, {}, node_bound});
      }
    }
  }

  // Proven global lower bound in the internal sense.
  double global_lb = pruned_lb;
  while (!heap.empty()) {
    global_lb = std::min(global_lb, nodes[-heap.top().second].bound);
    heap.pop();
  }
  if (!stopped_early && !std::isfinite(global_lb)) global_lb = incumbent;
  if (stopped_early) global_lb = std::min(global_lb, pruned_lb);

  out.nodes = processed;
  out.iterations = spx.iterations() - iters_before;
  out.wall_time_sec = seconds_since(start);

  if (!std::isfinite(incumbent)) {
    out.status = stopped_early ? stop_status : SolveStatus::kInfeasible;
    return out;
  }

  const double denom = std::max(1.0, std::abs(incumbent));
  double gap = 0.0;
  if (std::isfinite(global_lb)) {
    gap = std::max(0.0, (incumbent - global_lb) / denom);
  }
  out.rel_gap = gap;
  out.objective = model.sense() == ObjSense::kMaximize ? -incumbent : incumbent;
  out.values = std::move(incumbent_x);
  if (stopped_early) {
    out.status = stop_status;
  } else if (gap <= 1e-9) {
    out.status = SolveStatus::kOptimal;
  } else {
    out.status = SolveStatus::kFeasibleGapMet;
  }
  return out;
}

MilpSolver::MilpSolver() : impl_(new Impl) {}
MilpSolver::~MilpSolver() = default;
MilpSolver::MilpSolver(MilpSolver&&) noexcept = default;
MilpSolver& MilpSolver::operator=(MilpSolver&&) noexcept = default;

Solution MilpSolver::solve(const Model& model, const SolveSettings& settings) {
  return impl_->run(model, settings);
}

Solution solve_milp(const Model& model, const SolveSettings& settings) {
  MilpSolver solver;
  return solver.solve(model, settings);
}

Solution solve_lp(const Model& model, const SolveSettings& settings) {
  const auto start = Clock::now();
  Solution out;
  std::vector<double> lb(model.num_vars()), ub(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    lb[j] = model.var(j).lower;
    ub[j] = model.var(j).upper;
  }
  std::vector<double> cost = model.objective();
  if (model.sense() == ObjSense::kMaximize) {
    for (double& c : cost) c = -c;
  }
  std::vector<Simplex::RowSpec> rows;
  rows.reserve(model.num_rows());
  for (const RowDef& r : model.rows()) {
    rows.push_back({r.terms, r.rel, r.rhs});
  }
  Simplex spx;
  spx.load(lb, ub, cost, rows, settings.pivot_tol);
  const LpStatus st = spx.solve_primal();
  out.iterations = spx.iterations();
  out.wall_time_sec = seconds_since(start);
  switch (st) {
    case LpStatus::kOptimal: {
      out.status = SolveStatus::kOptimal;
      out.objective =
          model.sense() == ObjSense::kMaximize ? -spx.objective() : spx.objective();
      out.values = spx.solution();
      out.row_duals = spx.duals();
      if (model.sense() == ObjSense::kMaximize) {
        for (double& d : out.row_duals) d = -d;
      }
      break;
    }
    case LpStatus::kInfeasible:
      out.status = SolveStatus::kInfeasible;
      break;
    case LpStatus::kUnbounded:
      out.status = SolveStatus::kUnbounded;
      break;
    case LpStatus::kIterLimit:
      out.status = SolveStatus::kTimeLimit;
      break;
  }
  return out;
}

}  // namespace scengen
