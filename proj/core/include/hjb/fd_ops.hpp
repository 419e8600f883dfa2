#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "hjb/grid.hpp"
#include "hjb/problem.hpp"

namespace hjb {

/// Square matrix stored by diagonals for a fixed set of signed offsets.
/// Entries whose column falls outside [0, n) are structurally zero.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, std::vector<int> offsets);

  static BandedMatrix penta(int n) { return BandedMatrix(n, {-2, -1, 0, 1, 2}); }
  static BandedMatrix tri(int n) { return BandedMatrix(n, {-1, 0, 1}); }

  int size() const { return n_; }
  const std::vector<int>& offsets() const { return offsets_; }

  double& at(int row, int offset);
  double get(int row, int offset) const;
  std::span<const double> diagonal(int offset) const;
  std::span<double> diagonal(int offset);

  std::vector<double> apply(std::span<const double> x) const;

 private:
  int offset_index(int offset) const;

  int n_ = 0;
  std::vector<int> offsets_;
  std::vector<std::vector<double>> diags_;  // diags_[d][row]
};

/// Pentadiagonal layout (offsets -2..+2), the shape of a one-dimensional
/// implicit step matrix.
using PentaMatrix = BandedMatrix;
/// Tridiagonal layout, the shape of the second-difference matrix.
using TriMatrix = BandedMatrix;

// -- Stencils ----------------------------------------------------------------
// Padded vectors hold grid indices -1 .. I+2 (size I+4); outputs cover the
// interior indices 1 .. I.

/// Centered second difference (u_{i-1} - 2u_i + u_{i+1}) / h^2.
std::vector<double> d2(std::span<const double> padded, double h);
/// Left-sided second-order difference (3u_i - 4u_{i-1} + u_{i-2}) / (2h).
std::vector<double> d1_minus(std::span<const double> padded, double h);
/// Right-sided second-order difference -(3u_i - 4u_{i+1} + u_{i+2}) / (2h).
std::vector<double> d1_plus(std::span<const double> padded, double h);
/// Centered first difference (u_{i+1} - u_{i-1}) / (2h).
std::vector<double> d1_centered(std::span<const double> padded, double h);

/// Scaled second-difference matrix: diag 2/h^2, off-diagonals -1/h^2.
TriMatrix assemble_a_matrix(int interior_count, double h);

/// Row of the spatial operator L[u] + r u at one node, as coefficients of
/// u_{i+o} for o in -2..2 (no time-step scaling applied).
struct StencilRow {
  double m2 = 0, m1 = 0, c0 = 0, p1 = 0, p2 = 0;

  double coeff(int offset) const {
    switch (offset) {
      case -2: return m2;
      case -1: return m1;
      case 0: return c0;
      case 1: return p1;
      case 2: return p2;
      default: return 0.0;
    }
  }
};

StencilRow hamiltonian_row(double sigma, double b, double r, double h, DriftMode mode);

enum class StepMode { bdf2, euler };

/// One implicit step written as sup_a (M_a X - q_a) = 0 over the interior
/// unknowns; one banded matrix and right-hand side per control.
struct SupLinearSystem {
  std::vector<double> controls;
  std::vector<BandedMatrix> matrices;
  std::vector<std::vector<double>> rhs;
  double t = 0.0;
  double tau = 0.0;
  double h = 0.0;

  int size() const { return matrices.empty() ? 0 : matrices.front().size(); }
};

/// Isaacs variant: matrices indexed by (a, b) as a*n_inf + b.
struct SupInfLinearSystem {
  std::vector<double> controls_sup;
  std::vector<double> controls_inf;
  std::vector<BandedMatrix> matrices;
  std::vector<std::vector<double>> rhs;
  double t = 0.0;
  double tau = 0.0;
  double h = 0.0;

  int size() const { return matrices.empty() ? 0 : matrices.front().size(); }
  const BandedMatrix& matrix(int a, int b) const {
    return matrices[static_cast<size_t>(a) * controls_inf.size() + static_cast<size_t>(b)];
  }
  const std::vector<double>& q(int a, int b) const {
    return rhs[static_cast<size_t>(a) * controls_inf.size() + static_cast<size_t>(b)];
  }
};

/// Matrices and step-independent pieces of one implicit step; the right-hand
/// side is completed per time level by make_step_system.  For problems with
/// time-independent coefficients the operator can be reused across steps.
struct AssembledOperator {
  StepMode mode = StepMode::bdf2;
  std::vector<double> controls;
  std::vector<BandedMatrix> matrices;
  /// tau * ell(t, x_i, a), to be subtracted from q.
  std::vector<std::vector<double>> tau_source;
  /// Matrix entries that landed on ghost columns; folded into q against the
  /// boundary values of the current time level.
  struct GhostTerm {
    int control = 0;
    int row = 0;          // interior row, 0-based
    int ghost_index = 0;  // grid index in {-1, 0, I+1, I+2}
    double coeff = 0.0;   // tau-scaled matrix coefficient
  };
  std::vector<GhostTerm> ghosts;
  double tau = 0.0;
  double h = 0.0;
};

AssembledOperator assemble_operator(const HJBProblem& problem, const Grid1D& grid,
                                    double t_k, double tau, StepMode mode);

/// Completes q from the time history (2u^{k-1} - 1/2 u^{k-2} for BDF2,
/// u^{k-1} for Euler), the source term and the ghost data at time t_k.
SupLinearSystem make_step_system(const AssembledOperator& op, const HJBProblem& problem,
                                 const Grid1D& grid, double t_k,
                                 std::span<const double> u_prev,
                                 std::span<const double> u_prev2);

/// Convenience: assemble_operator + make_step_system in one call.
SupLinearSystem assemble_step_system(const HJBProblem& problem, const Grid1D& grid,
                                     double t_k, double tau,
                                     std::span<const double> u_prev,
                                     std::span<const double> u_prev2, StepMode mode);

/// Trapezoidal step: M_a = I + tau/2 L_a(t_k), q_a = u^{k-1}
/// - tau/2 H[u^{k-1}](t_{k-1}) - tau/2 ell(t_k) - ghost terms.  The padded
/// previous level carries ghost values at t_{k-1}.
SupLinearSystem assemble_cn_system(const HJBProblem& problem, const Grid1D& grid,
                                   double t_k, double tau,
                                   std::span<const double> u_prev_padded);

/// sup_a { L^a[u] + r u + ell } evaluated on a padded vector; used for the
/// explicit half of the trapezoidal scheme.
std::vector<double> hamiltonian_apply(const HJBProblem& problem, const Grid1D& grid,
                                      double t, std::span<const double> padded_u);

SupInfLinearSystem assemble_step_system_isaacs(const IsaacsProblem& problem,
                                               const Grid1D& grid, double t_k, double tau,
                                               std::span<const double> u_prev,
                                               std::span<const double> u_prev2,
                                               StepMode mode);

// -- Two-dimensional assembly ------------------------------------------------

struct Stencil2DCoeffs {
  double alpha = 0, beta = 0, gamma = 0;
};

/// Splits sigma1^2 v_xx + 2 rho sigma1 sigma2 v_xy + sigma2^2 v_yy into three
/// nonnegative-direction second differences (axes plus the (1,1) diagonal).
/// Requires rho >= 0.
Stencil2DCoeffs stencil_coefficients_2d(double sigma1, double sigma2, double rho,
                                        double hx, double hy);

/// Row-major interior ordering (x fastest): p = (j-1)*I1 + (i-1).
SupLinearSystem assemble_step_system_2d(const HJBProblem2D& problem, const Grid2D& grid,
                                        double t_k, double tau,
                                        std::span<const double> u_prev,
                                        std::span<const double> u_prev2, StepMode mode);

/// Plain-text banded dump: one line per row, "row o:value o:value ...".
void dump_banded(std::ostream& os, const BandedMatrix& m);

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hjb
