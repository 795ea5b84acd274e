// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scengen/milp.hpp"
#include "scengen/model.hpp"

namespace {

using namespace scengen;

// Dense random LP with n variables and n rows, seeded for repeatability.
Model dense_lp(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> width(1.0, 5.0);
  Model m;
  for (int j = 0; j < n; ++j) {
    m.add_continuous("x" + std::to_string(j), 0.0, width(rng));
    m.set_objective_coef(j, coef(rng));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<LinearTerm> terms;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = coef(rng);
      terms.push_back({j, c});
      total += std::abs(c);
    }
    m.add_row("r" + std::to_string(i), std::move(terms), Relation::kLessEqual,
              0.5 * total);
  }
  return m;
}

void BM_solve_lp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = dense_lp(n, 12345);
  for (auto _ : state) {
    Solution s = solve_lp(m);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_solve_lp)->Arg(20)->Arg(60)->Arg(120);

void BM_warm_objective_swap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Model m = dense_lp(n, 777);
  MilpSolver solver;
  solver.solve(m);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (auto _ : state) {
    for (int j = 0; j < n; ++j) m.set_objective_coef(j, coef(rng));
    Solution s = solver.solve(m);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_warm_objective_swap)->Arg(20)->Arg(60)->Arg(120);

void BM_knapsack_milp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> v(3, 40);
  Model m;
  std::vector<LinearTerm> terms;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    m.add_binary("b" + std::to_string(j));
    m.set_objective_coef(j, v(rng));
    const double w = v(rng);
    terms.push_back({j, w});
    total += w;
  }
  m.add_row("cap", terms, Relation::kLessEqual, 0.4 * total);
  m.set_sense(ObjSense::kMaximize);
  SolveSettings s;
  s.rel_gap = 0.0;
  for (auto _ : state) {
    Solution sol = solve_milp(m, s);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_knapsack_milp)->Arg(14)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
