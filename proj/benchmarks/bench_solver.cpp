#include <benchmark/benchmark.h>

#include "hjb/fd_ops.hpp"
#include "hjb/stepper.hpp"
#include "hjb/sup_solver.hpp"

namespace {

using namespace hjb;

// One implicit step system for the two-control diffusion scenario at a given
// mesh size, tau/h fixed at 5.
SupLinearSystem make_system(int i_plus_1) {
  const HJBProblem p = controlled_diffusion_problem();
  const Grid1D g = build_grid_1d(p.x_min, p.x_max, i_plus_1 - 1);
  const double tau = 5.0 * g.h;
  std::vector<double> prev(static_cast<size_t>(g.interior_count));
  for (int i = 1; i <= g.interior_count; ++i) {
    prev[static_cast<size_t>(i - 1)] = p.initial(g.node(i));
  }
  return assemble_step_system(p, g, tau, tau, prev, {}, StepMode::euler);
}

void bm_assemble_step_system(benchmark::State& state) {
  const int i_plus_1 = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_system(i_plus_1));
  }
  state.SetComplexityN(i_plus_1);
}
BENCHMARK(bm_assemble_step_system)->Range(256, 8192)->Complexity(benchmark::oN);

// tau = 5h makes the sweep contraction factor approach 1 as the mesh is
// refined, so the cold iteration count grows roughly linearly with the size.
SolveOptions bench_options() {
  SolveOptions o;
  o.max_iter = 2000000;
  return o;
}

void bm_solve_sup_cold(benchmark::State& state) {
  const SupLinearSystem sys = make_system(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sup(sys, bench_options(), {}, nullptr));
  }
}
BENCHMARK(bm_solve_sup_cold)->RangeMultiplier(2)->Range(256, 2048);

void bm_solve_sup_warm(benchmark::State& state) {
  const SupLinearSystem sys = make_system(static_cast<int>(state.range(0)));
  const std::vector<double> x = solve_sup(sys, bench_options(), {}, nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sup(sys, bench_options(), x, nullptr));
  }
}
BENCHMARK(bm_solve_sup_warm)->RangeMultiplier(2)->Range(256, 2048);

void bm_full_run(benchmark::State& state) {
  const HJBProblem p = eikonal_problem();
  const int n = static_cast<int>(state.range(0));
  const Grid1D g = build_grid_1d(p.x_min, p.x_max, 2 * n - 1);  // tau/h = 0.1
  const TimeGrid t = build_time_grid(p.horizon, n);
  StepperOptions opts;
  opts.store_levels = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bdf2(p, g, t, opts));
  }
}
BENCHMARK(bm_full_run)->Range(20, 160)->Unit(benchmark::kMillisecond);

}  // namespace
