#pragma once

#include <vector>

#include "hjb/fd_ops.hpp"
#include "hjb/grid.hpp"
#include "hjb/problem.hpp"
#include "hjb/sup_solver.hpp"

namespace hjb {

enum class SchemeTag {
  bdf2,            ///< two-step backward differentiation, backward-Euler startup
  implicit_euler,  ///< backward Euler at every level
  crank_nicolson,  ///< trapezoidal rule, nonlinearity evaluated at both levels
};

/// Per-step diagnostics.
struct StepRecord {
  int k = 0;
  double t = 0.0;
  SolveStats solve;
  double certificate_ratio = 0.0;
  double cfl_ratio = 0.0;
  bool cfl_ok = true;
};

struct StepperOptions {
  SolveOptions solver;
  /// When false, only the initial and final levels are kept (levels.front()
  /// and levels.back()); long reference runs would not fit in memory
  /// otherwise.
  bool store_levels = true;
};

/// Full discrete solution: levels[k] holds the interior values at t_k.
struct Trajectory {
  Grid1D grid;
  TimeGrid time;
  SchemeTag scheme = SchemeTag::bdf2;
  std::vector<std::vector<double>> levels;
  std::vector<StepRecord> steps;
};

struct Trajectory2D {
  Grid2D grid;
  TimeGrid time;
  SchemeTag scheme = SchemeTag::bdf2;
  /// Row-major interior values, x fastest: p = (j-1)*I1 + (i-1).
  std::vector<std::vector<double>> levels;
  std::vector<StepRecord> steps;
};

Trajectory run_bdf2(const HJBProblem& problem, const Grid1D& grid, const TimeGrid& time,
                    const StepperOptions& opts = {});

Trajectory run_implicit_euler(const HJBProblem& problem, const Grid1D& grid,
                              const TimeGrid& time, const StepperOptions& opts = {});

Trajectory run_crank_nicolson(const HJBProblem& problem, const Grid1D& grid,
                              const TimeGrid& time, const StepperOptions& opts = {});

Trajectory run_isaacs(const IsaacsProblem& problem, const Grid1D& grid, const TimeGrid& time,
                      const StepperOptions& opts = {});

Trajectory2D run_bdf2_2d(const HJBProblem2D& problem, const Grid2D& grid, const TimeGrid& time,
                         const StepperOptions& opts = {});

}  // namespace hjb
