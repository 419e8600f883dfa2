#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjb/grid.hpp"

namespace hjb {

/// Coefficient callback over (t, x, control).
using Coeff1D = std::function<double(double, double, double)>;
/// Boundary-value callback over (t, x); sampled at the ghost nodes.
using BoundaryFn = std::function<double(double, double)>;
using InitialFn = std::function<double(double)>;
/// Exact solution over (t, x), when available.
using ExactFn = std::function<double(double, double)>;

/// Spatial approximation of the first-order (drift) term.
enum class DriftMode {
  bdf_upwind,  ///< one-sided second-order BDF stencil, chosen by the drift sign
  centered,    ///< classical centered difference
};

/// v_t + sup_a { -1/2 sigma^2 v_xx + b v_x + r v + l } = 0 on a truncated
/// interval with Dirichlet data at the two ghost nodes per side, over a
/// finite control list.
struct HJBProblem {
  std::string name;
  std::vector<double> controls;
  Coeff1D sigma;
  Coeff1D drift;
  Coeff1D discount;
  Coeff1D source;
  InitialFn initial;
  BoundaryFn boundary;
  ExactFn exact;  ///< may be empty
  DriftMode drift_mode = DriftMode::bdf_upwind;
  /// Set when sigma/drift/discount/source do not depend on t; lets the
  /// steppers reuse the assembled matrices across time levels.
  bool time_invariant = false;

  // Intended computational domain.
  double x_min = -1.0;
  double x_max = 1.0;
  double horizon = 1.0;
};

/// Coefficient callback over (t, x, a, b) for two-player problems.
using CoeffIsaacs = std::function<double(double, double, double, double)>;

/// sup over a in controls_sup, inf over b in controls_inf.
struct IsaacsProblem {
  std::string name;
  std::vector<double> controls_sup;
  std::vector<double> controls_inf;
  CoeffIsaacs sigma;
  CoeffIsaacs drift;
  CoeffIsaacs discount;
  CoeffIsaacs source;
  InitialFn initial;
  BoundaryFn boundary;
  ExactFn exact;
  DriftMode drift_mode = DriftMode::bdf_upwind;
  bool time_invariant = false;

  double x_min = -1.0;
  double x_max = 1.0;
  double horizon = 1.0;
};

using Coeff2D = std::function<double(double, double, double, double)>;  // (t, x, y, a)
using Boundary2DFn = std::function<double(double, double, double)>;     // (t, x, y)
using Initial2DFn = std::function<double(double, double)>;

struct HJBProblem2D {
  std::string name;
  std::vector<double> controls;
  Coeff2D sigma1;
  Coeff2D sigma2;
  Coeff2D rho;
  Coeff2D drift1;
  Coeff2D drift2;
  Coeff2D discount;
  Coeff2D source;
  Initial2DFn initial;
  Boundary2DFn boundary;
  std::function<double(double, double, double)> exact;  // (t, x, y), may be empty
  DriftMode drift_mode = DriftMode::bdf_upwind;
  bool time_invariant = false;

  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  double horizon = 1.0;
};

/// Sampled diagnostics for the structural assumptions the analysis relies on:
/// boundedness, uniform ellipticity, Lipschitz diffusion, Lipschitz drift and
/// semiconcave squared diffusion.  Report only; nothing is enforced.
struct AssumptionReport {
  // (A1) sampled sups
  double sup_sigma = 0.0;
  double sup_drift = 0.0;
  double sup_discount = 0.0;
  // (A2) sampled inf of sigma^2
  double ellipticity_eta = 0.0;
  // (A3) max divided difference of sigma^2 in x
  double sigma_sq_lipschitz = 0.0;
  // (A4) max divided difference of b, and semiconcavity bound for sigma^2:
  // smallest second divided difference is >= -semiconcavity_bound.
  double drift_lipschitz = 0.0;
  double semiconcavity_bound = 0.0;

  // Sample set the estimates were computed on.
  int space_samples = 0;
  int time_samples = 0;
  int control_samples = 0;
};

AssumptionReport check_assumptions(const HJBProblem& problem, const Grid1D& grid,
                                   const TimeGrid& time);

/// v_t + |v_x| = 0 on (-2,2), T = 0.2, with the bump initial datum
/// max(0, 1-x^2)^4; exact solution min of the two translates.
HJBProblem eikonal_problem();

/// Same equation with the negated (valley) initial datum.  The exact solution
/// is the running minimum over the dependence cone: -v0(max(|x|-t, 0)).
HJBProblem eikonal_problem_negative();

/// v_t + sup_{s in {0.1, 0.5}} (-1/2 s^2 v_xx) = 0 on (-1,1), T = 0.5,
/// initial sin(pi x), zero Dirichlet data; no closed-form solution.
HJBProblem controlled_diffusion_problem();

/// All coefficients zero; the solution is stationary.  Handy as a smoke
/// scenario with exactly zero error.
HJBProblem zero_dynamics_problem();

}  // namespace hjb
