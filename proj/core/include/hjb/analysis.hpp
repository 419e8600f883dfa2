#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hjb/problem.hpp"
#include "hjb/stepper.hpp"

namespace hjb {

enum class NormKind {
  euclidean,    ///< plain l2 of the coefficient vector
  l2_rescaled,  ///< euclidean * sqrt(h); discrete L2
  a_norm,       ///< energy norm of the second-difference matrix
  h1_rescaled,  ///< a_norm * sqrt(h); discrete H1 seminorm
  sup,
};

/// Norm of an interior vector.  The energy norm sums the squared divided
/// differences over all I+1 gaps, with zero extension at both walls.
double norm(std::span<const double> u, NormKind kind, double h);

/// Smallest eigenvalue of the scaled second-difference matrix,
/// (4/h^2) sin^2(pi h / (2L)) with L = h (I+1).
double a_matrix_lambda_min(int interior_count, double h);

/// Worst error against a closed-form solution over levels k >= first_level
/// (default 2, past the startup step).  Requires a fully stored trajectory.
struct ErrorVsExact {
  double value = 0.0;
  int worst_level = -1;
};
ErrorVsExact error_vs_exact(const Trajectory& traj, const ExactFn& exact, NormKind kind,
                            int first_level = 2);

/// Error of the final level against the final level of a finer reference run.
/// The reference node set must contain the coarse one: (I_ref + 1) must be a
/// multiple of (I + 1).  The norm is taken on the coarse grid.
double error_vs_reference(const Trajectory& traj, const Trajectory& reference, NormKind kind);

/// A smooth test function with the derivatives the truncation error needs.
struct SmoothFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dxx;
};

/// Local truncation error at level k: the discrete one-step operator applied
/// to samples of phi, minus the exact parabolic operator at (t_k, x_i).
std::vector<double> consistency_error(SchemeTag scheme, const SmoothFunction& phi,
                                      const HJBProblem& problem, const Grid1D& grid,
                                      const TimeGrid& time, int k);

// -- Convergence tables ------------------------------------------------------

/// Refinement ladder: level l runs n0 * 2^l time steps on i0_plus_1 * 2^l
/// mesh intervals.
struct Ladder {
  int n0 = 5;
  int i0_plus_1 = 10;
  int levels = 1;
};

struct LevelResult {
  std::vector<double> errors;  ///< one entry per requested norm
  double cpu_seconds = 0.0;
};
using LevelRunner = std::function<LevelResult(int n_steps, int i_plus_1)>;

struct TableRow {
  int n_steps = 0;
  int i_plus_1 = 0;
  std::vector<double> errors;
  std::vector<double> orders;  ///< NaN on the first row
  double cpu_seconds = 0.0;
};

struct ConvergenceTable {
  std::vector<NormKind> norms;
  std::vector<TableRow> rows;
};

ConvergenceTable convergence_table(const LevelRunner& runner, const Ladder& ladder,
                                   std::vector<NormKind> norms);

// -- Two-step stability weights ----------------------------------------------

/// Weights a_p with M_tau^{-1} = sum_p a_p J^p for the upper-triangular
/// two-step companion matrix M_tau = (3 - C tau) I - 4 J + J^2.  Requires
/// C tau < 3.  `a` uses the closed form in the roots lambda1/lambda2;
/// `a_direct` solves the triangular recurrence; `bound` is the growth cap
/// (3/2) exp(2 C count tau).
struct StabilityCoefficients {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> a;
  std::vector<double> a_direct;
  double bound = 0.0;
};

StabilityCoefficients stability_coefficients(double C, double tau, int count);

/// Largest second difference |u_{i-1} - 2u_i + u_{i+1}| over interior nodes;
/// a plain oscillation detector for comparing drift discretizations.
double oscillation_metric(std::span<const double> interior);

}  // namespace hjb
