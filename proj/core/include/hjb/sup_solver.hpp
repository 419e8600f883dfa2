#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjb/fd_ops.hpp"

namespace hjb {

/// Strict-diagonal-dominance certificate for the Gauss-Seidel fixed point.
/// ratio is the worst, over controls and rows, of
///   (sum of |entries right of the diagonal|) / (|diagonal| - sum left),
/// and the iteration contracts with factor ratio when ratio < 1.
struct Certificate {
  double ratio = 0.0;
  int worst_row = -1;
  int worst_control = -1;  ///< flat (a*n_inf + b) index for two-player systems
  bool feasible = false;   ///< all denominators positive and ratio < 1
};

Certificate certificate(const SupLinearSystem& sys);
Certificate certificate(const SupInfLinearSystem& sys);

struct SolveStats {
  int iterations = 0;
  double final_residual_inf = 0.0;
  /// Observed ratio of successive update sizes; at most the certificate
  /// ratio up to roundoff.
  double contraction_estimate = 0.0;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

struct InfeasibleSystem : std::runtime_error {
  InfeasibleSystem(const std::string& msg, Certificate cert)
      : std::runtime_error(msg), cert(cert) {}
  Certificate cert;
};

struct ConvergenceFailure : std::runtime_error {
  ConvergenceFailure(const std::string& msg, SolveStats stats)
      : std::runtime_error(msg), stats(stats) {}
  SolveStats stats;
};

/// Solves sup_a (M_a X - q_a) = 0 by the Gauss-Seidel-type fixed point
///   x_i <- min_a (q_{a,i} - sum_{j<i} M_ij x_j^new - sum_{j>i} M_ij x_j^old) / M_{a,ii}.
/// `initial` seeds the iteration (empty means zero).  Throws
/// InfeasibleSystem when the certificate fails and ConvergenceFailure when
/// max_iter is exhausted.
std::vector<double> solve_sup(const SupLinearSystem& sys, const SolveOptions& opts,
                              std::span<const double> initial, SolveStats* stats = nullptr);

/// Two-player variant: x_i <- min over a of max over b of the per-(a,b) root.
/// With a singleton inner control set this reduces bit-for-bit to solve_sup.
std::vector<double> solve_supinf(const SupInfLinearSystem& sys, const SolveOptions& opts,
                                 std::span<const double> initial, SolveStats* stats = nullptr);

/// Direct banded LU solve (partial pivoting) of M x = q for one control's
/// matrix; oracle and fallback for single-control problems.
std::vector<double> solve_direct_single_control(const BandedMatrix& m,
                                                std::span<const double> q);

}  // namespace hjb
