#include "hjb/fd_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hjb {

BandedMatrix::BandedMatrix(int n, std::vector<int> offsets) : n_(n), offsets_(std::move(offsets)) {
  if (n < 1) throw std::invalid_argument("BandedMatrix: size must be >= 1");
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
  diags_.assign(offsets_.size(), std::vector<double>(static_cast<size_t>(n), 0.0));
}

int BandedMatrix::offset_index(int offset) const {
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
  if (it == offsets_.end() || *it != offset) {
    throw std::out_of_range("BandedMatrix: offset " + std::to_string(offset) + " not stored");
  }
  return static_cast<int>(it - offsets_.begin());
}

double& BandedMatrix::at(int row, int offset) {
  const int col = row + offset;
  if (row < 0 || row >= n_ || col < 0 || col >= n_) {
    throw std::out_of_range("BandedMatrix: entry (" + std::to_string(row) + ", " +
                            std::to_string(col) + ") outside the matrix");
  }
  return diags_[static_cast<size_t>(offset_index(offset))][static_cast<size_t>(row)];
}

double BandedMatrix::get(int row, int offset) const {
  const int col = row + offset;
  if (row < 0 || row >= n_) throw std::out_of_range("BandedMatrix: row outside the matrix");
  if (col < 0 || col >= n_) return 0.0;
  return diags_[static_cast<size_t>(offset_index(offset))][static_cast<size_t>(row)];
}

std::span<const double> BandedMatrix::diagonal(int offset) const {
  return diags_[static_cast<size_t>(offset_index(offset))];
}

std::span<double> BandedMatrix::diagonal(int offset) {
  return diags_[static_cast<size_t>(offset_index(offset))];
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw std::invalid_argument("BandedMatrix::apply: size mismatch");
  }
  std::vector<double> y(static_cast<size_t>(n_), 0.0);
  for (size_t d = 0; d < offsets_.size(); ++d) {
    const int o = offsets_[d];
    const auto& diag = diags_[d];
    const int lo = std::max(0, -o);
    const int hi = std::min(n_, n_ - o);
    for (int i = lo; i < hi; ++i) {
      y[static_cast<size_t>(i)] += diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i + o)];
    }
  }
  return y;
}

namespace {

int interior_from_padded(std::span<const double> padded) {
  if (padded.size() < 5) throw std::invalid_argument("stencil: padded vector too short");
  return static_cast<int>(padded.size()) - 4;
}

void require_h(double h) {
  if (!(h > 0)) throw std::invalid_argument("stencil: h must be > 0");
}

}  // namespace

std::vector<double> d2(std::span<const double> padded, double h) {
  require_h(h);
  const int n = interior_from_padded(padded);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int p = Grid1D::pad(i);
    out[static_cast<size_t>(i - 1)] =
        (padded[p - 1] - 2.0 * padded[p] + padded[p + 1]) / (h * h);
  }
  return out;
}

std::vector<double> d1_minus(std::span<const double> padded, double h) {
  require_h(h);
  const int n = interior_from_padded(padded);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int p = Grid1D::pad(i);
    out[static_cast<size_t>(i - 1)] =
        (3.0 * padded[p] - 4.0 * padded[p - 1] + padded[p - 2]) / (2.0 * h);
  }
  return out;
}

std::vector<double> d1_plus(std::span<const double> padded, double h) {
  require_h(h);
  const int n = interior_from_padded(padded);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int p = Grid1D::pad(i);
    out[static_cast<size_t>(i - 1)] =
        -(3.0 * padded[p] - 4.0 * padded[p + 1] + padded[p + 2]) / (2.0 * h);
  }
  return out;
}

std::vector<double> d1_centered(std::span<const double> padded, double h) {
  require_h(h);
  const int n = interior_from_padded(padded);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int p = Grid1D::pad(i);
    out[static_cast<size_t>(i - 1)] = (padded[p + 1] - padded[p - 1]) / (2.0 * h);
  }
  return out;
}

TriMatrix assemble_a_matrix(int interior_count, double h) {
  require_h(h);
  TriMatrix m = BandedMatrix::tri(interior_count);
  const double d = 2.0 / (h * h);
  const double o = -1.0 / (h * h);
  for (int i = 0; i < interior_count; ++i) {
    m.at(i, 0) = d;
    if (i > 0) m.at(i, -1) = o;
    if (i + 1 < interior_count) m.at(i, 1) = o;
  }
  return m;
}

StencilRow hamiltonian_row(double sigma, double b, double r, double h, DriftMode mode) {
  require_h(h);
  StencilRow row;
  const double diff = 0.5 * sigma * sigma;
  // -1/2 sigma^2 D2
  row.m1 -= diff / (h * h);
  row.c0 += 2.0 * diff / (h * h);
  row.p1 -= diff / (h * h);
  if (mode == DriftMode::bdf_upwind) {
    const double bp = std::max(b, 0.0);
    const double bm = std::max(-b, 0.0);
    // b+ D1- : (3u_i - 4u_{i-1} + u_{i-2}) / 2h
    row.c0 += 3.0 * bp / (2.0 * h);
    row.m1 += -4.0 * bp / (2.0 * h);
    row.m2 += bp / (2.0 * h);
    // -b- D1+ : (3u_i - 4u_{i+1} + u_{i+2}) / 2h times b-
    row.c0 += 3.0 * bm / (2.0 * h);
    row.p1 += -4.0 * bm / (2.0 * h);
    row.p2 += bm / (2.0 * h);
  } else {
    row.p1 += b / (2.0 * h);
    row.m1 += -b / (2.0 * h);
  }
  row.c0 += r;
  return row;
}

namespace {

constexpr int kOffsets[] = {-2, -1, 0, 1, 2};

void require_finite(double v, const char* what, double t, double x, double a) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "assembly: non-finite " << what << " at t=" << t << ", x=" << x << ", a=" << a;
    throw AssemblyError(os.str());
  }
}

double lead_coefficient(StepMode mode) { return mode == StepMode::bdf2 ? 1.5 : 1.0; }

}  // namespace

AssembledOperator assemble_operator(const HJBProblem& problem, const Grid1D& grid,
                                    double t_k, double tau, StepMode mode) {
  if (!(tau > 0)) throw std::invalid_argument("assemble_operator: tau must be > 0");
  const int n = grid.interior_count;
  const double lead = lead_coefficient(mode);

  AssembledOperator op;
  op.mode = mode;
  op.controls = problem.controls;
  op.tau = tau;
  op.h = grid.h;
  op.matrices.reserve(problem.controls.size());
  op.tau_source.reserve(problem.controls.size());

  for (size_t c = 0; c < problem.controls.size(); ++c) {
    const double a = problem.controls[c];
    BandedMatrix m = BandedMatrix::penta(n);
    std::vector<double> src(static_cast<size_t>(n));
    for (int gi = 1; gi <= n; ++gi) {
      const double x = grid.node(gi);
      const double sigma = problem.sigma(t_k, x, a);
      const double b = problem.drift(t_k, x, a);
      const double r = problem.discount(t_k, x, a);
      const double ell = problem.source(t_k, x, a);
      require_finite(sigma, "sigma", t_k, x, a);
      require_finite(b, "drift", t_k, x, a);
      require_finite(r, "discount", t_k, x, a);
      require_finite(ell, "source", t_k, x, a);
      const StencilRow row = hamiltonian_row(sigma, b, r, grid.h, problem.drift_mode);
      const int p = gi - 1;
      for (int o : kOffsets) {
        const double coeff = tau * row.coeff(o) + (o == 0 ? lead : 0.0);
        if (coeff == 0.0) continue;
        const int gj = gi + o;
        if (gj >= 1 && gj <= n) {
          m.at(p, o) = coeff;
        } else {
          op.ghosts.push_back({static_cast<int>(c), p, gj, coeff});
        }
      }
      src[static_cast<size_t>(p)] = tau * ell;
    }
    op.matrices.push_back(std::move(m));
    op.tau_source.push_back(std::move(src));
  }
  return op;
}

SupLinearSystem make_step_system(const AssembledOperator& op, const HJBProblem& problem,
                                 const Grid1D& grid, double t_k,
                                 std::span<const double> u_prev,
                                 std::span<const double> u_prev2) {
  const int n = grid.interior_count;
  if (static_cast<int>(u_prev.size()) != n) {
    throw std::invalid_argument("make_step_system: u_prev size mismatch");
  }
  if (op.mode == StepMode::bdf2 && static_cast<int>(u_prev2.size()) != n) {
    throw std::invalid_argument("make_step_system: u_prev2 size mismatch");
  }

  std::vector<double> history(static_cast<size_t>(n));
  if (op.mode == StepMode::bdf2) {
    for (int i = 0; i < n; ++i) {
      history[static_cast<size_t>(i)] =
          2.0 * u_prev[static_cast<size_t>(i)] - 0.5 * u_prev2[static_cast<size_t>(i)];
    }
  } else {
    for (int i = 0; i < n; ++i) history[static_cast<size_t>(i)] = u_prev[static_cast<size_t>(i)];
  }

  SupLinearSystem sys;
  sys.controls = op.controls;
  sys.matrices = op.matrices;
  sys.t = t_k;
  sys.tau = op.tau;
  sys.h = op.h;
  sys.rhs.reserve(op.controls.size());
  for (size_t c = 0; c < op.controls.size(); ++c) {
    std::vector<double> q = history;
    for (int i = 0; i < n; ++i) q[static_cast<size_t>(i)] -= op.tau_source[c][static_cast<size_t>(i)];
    sys.rhs.push_back(std::move(q));
  }
  for (const auto& g : op.ghosts) {
    const double bv = problem.boundary(t_k, grid.node(g.ghost_index));
    sys.rhs[static_cast<size_t>(g.control)][static_cast<size_t>(g.row)] -= g.coeff * bv;
  }
  return sys;
}

SupLinearSystem assemble_step_system(const HJBProblem& problem, const Grid1D& grid,
                                     double t_k, double tau,
                                     std::span<const double> u_prev,
                                     std::span<const double> u_prev2, StepMode mode) {
  const AssembledOperator op = assemble_operator(problem, grid, t_k, tau, mode);
  return make_step_system(op, problem, grid, t_k, u_prev, u_prev2);
}

std::vector<double> hamiltonian_apply(const HJBProblem& problem, const Grid1D& grid,
                                      double t, std::span<const double> padded_u) {
  const int n = grid.interior_count;
  if (static_cast<int>(padded_u.size()) != grid.padded_size()) {
    throw std::invalid_argument("hamiltonian_apply: padded vector size mismatch");
  }
  std::vector<double> out(static_cast<size_t>(n));
  for (int gi = 1; gi <= n; ++gi) {
    const double x = grid.node(gi);
    double best = -std::numeric_limits<double>::infinity();
    for (double a : problem.controls) {
      const StencilRow row = hamiltonian_row(problem.sigma(t, x, a), problem.drift(t, x, a),
                                             problem.discount(t, x, a), grid.h,
                                             problem.drift_mode);
      const int p = Grid1D::pad(gi);
      double v = problem.source(t, x, a);
      for (int o : kOffsets) v += row.coeff(o) * padded_u[static_cast<size_t>(p + o)];
      best = std::max(best, v);
    }
    out[static_cast<size_t>(gi - 1)] = best;
  }
  return out;
}

SupLinearSystem assemble_cn_system(const HJBProblem& problem, const Grid1D& grid,
                                   double t_k, double tau,
                                   std::span<const double> u_prev_padded) {
  if (!(tau > 0)) throw std::invalid_argument("assemble_cn_system: tau must be > 0");
  const int n = grid.interior_count;
  if (static_cast<int>(u_prev_padded.size()) != grid.padded_size()) {
    throw std::invalid_argument("assemble_cn_system: padded vector size mismatch");
  }
  const double t_prev = t_k - tau;
  const std::vector<double> h_prev = hamiltonian_apply(problem, grid, t_prev, u_prev_padded);

  SupLinearSystem sys;
  sys.controls = problem.controls;
  sys.t = t_k;
  sys.tau = tau;
  sys.h = grid.h;

  for (double a : problem.controls) {
    BandedMatrix m = BandedMatrix::penta(n);
    std::vector<double> q(static_cast<size_t>(n));
    for (int gi = 1; gi <= n; ++gi) {
      const double x = grid.node(gi);
      const double sigma = problem.sigma(t_k, x, a);
      const double b = problem.drift(t_k, x, a);
      const double r = problem.discount(t_k, x, a);
      const double ell = problem.source(t_k, x, a);
      require_finite(sigma, "sigma", t_k, x, a);
      require_finite(b, "drift", t_k, x, a);
      require_finite(r, "discount", t_k, x, a);
      require_finite(ell, "source", t_k, x, a);
      const StencilRow row = hamiltonian_row(sigma, b, r, grid.h, problem.drift_mode);
      const int p = gi - 1;
      double rhs = u_prev_padded[static_cast<size_t>(Grid1D::pad(gi))] -
                   0.5 * tau * h_prev[static_cast<size_t>(p)] - 0.5 * tau * ell;
      for (int o : kOffsets) {
        const double coeff = 0.5 * tau * row.coeff(o) + (o == 0 ? 1.0 : 0.0);
        if (coeff == 0.0) continue;
        const int gj = gi + o;
        if (gj >= 1 && gj <= n) {
          m.at(p, o) = coeff;
        } else {
          rhs -= coeff * problem.boundary(t_k, grid.node(gj));
        }
      }
      q[static_cast<size_t>(p)] = rhs;
    }
    sys.matrices.push_back(std::move(m));
    sys.rhs.push_back(std::move(q));
  }
  return sys;
}

SupInfLinearSystem assemble_step_system_isaacs(const IsaacsProblem& problem,
                                               const Grid1D& grid, double t_k, double tau,
                                               std::span<const double> u_prev,
                                               std::span<const double> u_prev2,
                                               StepMode mode) {
  if (!(tau > 0)) throw std::invalid_argument("assemble_step_system_isaacs: tau must be > 0");
  const int n = grid.interior_count;
  if (static_cast<int>(u_prev.size()) != n) {
    throw std::invalid_argument("assemble_step_system_isaacs: u_prev size mismatch");
  }
  if (mode == StepMode::bdf2 && static_cast<int>(u_prev2.size()) != n) {
    throw std::invalid_argument("assemble_step_system_isaacs: u_prev2 size mismatch");
  }
  const double lead = lead_coefficient(mode);

  std::vector<double> history(static_cast<size_t>(n));
  if (mode == StepMode::bdf2) {
    for (int i = 0; i < n; ++i) {
      history[static_cast<size_t>(i)] =
          2.0 * u_prev[static_cast<size_t>(i)] - 0.5 * u_prev2[static_cast<size_t>(i)];
    }
  } else {
    for (int i = 0; i < n; ++i) history[static_cast<size_t>(i)] = u_prev[static_cast<size_t>(i)];
  }

  SupInfLinearSystem sys;
  sys.controls_sup = problem.controls_sup;
  sys.controls_inf = problem.controls_inf;
  sys.t = t_k;
  sys.tau = tau;
  sys.h = grid.h;

  for (double a : problem.controls_sup) {
    for (double b_ctrl : problem.controls_inf) {
      BandedMatrix m = BandedMatrix::penta(n);
      std::vector<double> q = history;
      for (int gi = 1; gi <= n; ++gi) {
        const double x = grid.node(gi);
        const double sigma = problem.sigma(t_k, x, a, b_ctrl);
        const double drift = problem.drift(t_k, x, a, b_ctrl);
        const double r = problem.discount(t_k, x, a, b_ctrl);
        const double ell = problem.source(t_k, x, a, b_ctrl);
        require_finite(sigma, "sigma", t_k, x, a);
        require_finite(drift, "drift", t_k, x, a);
        require_finite(r, "discount", t_k, x, a);
        require_finite(ell, "source", t_k, x, a);
        const StencilRow row = hamiltonian_row(sigma, drift, r, grid.h, problem.drift_mode);
        const int p = gi - 1;
        q[static_cast<size_t>(p)] -= tau * ell;
        for (int o : kOffsets) {
          const double coeff = tau * row.coeff(o) + (o == 0 ? lead : 0.0);
          if (coeff == 0.0) continue;
          const int gj = gi + o;
          if (gj >= 1 && gj <= n) {
            m.at(p, o) = coeff;
          } else {
            q[static_cast<size_t>(p)] -= coeff * problem.boundary(t_k, grid.node(gj));
          }
        }
      }
      sys.matrices.push_back(std::move(m));
      sys.rhs.push_back(std::move(q));
    }
  }
  return sys;
}

Stencil2DCoeffs stencil_coefficients_2d(double sigma1, double sigma2, double rho,
                                        double hx, double hy) {
  require_h(hx);
  require_h(hy);
  if (rho < 0.0) {
    throw std::invalid_argument("stencil_coefficients_2d: correlation must be >= 0");
  }
  Stencil2DCoeffs c;
  c.alpha = (sigma1 / hx) * (sigma1 / hx - rho * sigma2 / hy);
  c.beta = (sigma2 / hy) * (sigma2 / hy - rho * sigma1 / hx);
  c.gamma = rho * sigma1 * sigma2 / (hx * hy);
  if (c.alpha < 0.0 || c.beta < 0.0) {
    std::ostringstream os;
    os << "stencil_coefficients_2d: cross term too strong for the mesh ratio (alpha="
       << c.alpha << ", beta=" << c.beta << ")";
    throw AssemblyError(os.str());
  }
  return c;
}

SupLinearSystem assemble_step_system_2d(const HJBProblem2D& problem, const Grid2D& grid,
                                        double t_k, double tau,
                                        std::span<const double> u_prev,
                                        std::span<const double> u_prev2, StepMode mode) {
  if (!(tau > 0)) throw std::invalid_argument("assemble_step_system_2d: tau must be > 0");
  const int i1 = grid.x.interior_count;
  const int i2 = grid.y.interior_count;
  const int n = i1 * i2;
  if (static_cast<int>(u_prev.size()) != n) {
    throw std::invalid_argument("assemble_step_system_2d: u_prev size mismatch");
  }
  if (mode == StepMode::bdf2 && static_cast<int>(u_prev2.size()) != n) {
    throw std::invalid_argument("assemble_step_system_2d: u_prev2 size mismatch");
  }
  const double hx = grid.x.h;
  const double hy = grid.y.h;
  const double lead = lead_coefficient(mode);

  std::vector<double> history(static_cast<size_t>(n));
  if (mode == StepMode::bdf2) {
    for (int i = 0; i < n; ++i) {
      history[static_cast<size_t>(i)] =
          2.0 * u_prev[static_cast<size_t>(i)] - 0.5 * u_prev2[static_cast<size_t>(i)];
    }
  } else {
    for (int i = 0; i < n; ++i) history[static_cast<size_t>(i)] = u_prev[static_cast<size_t>(i)];
  }

  // Stencil moves as (di, dj) with their numeric offsets (x fastest).  Numeric
  // offsets may collide on narrow grids; colliding contributions accumulate.
  struct Move {
    int di, dj;
  };
  const Move moves[] = {{-2, 0}, {-1, 0}, {0, 0},  {1, 0},   {2, 0},  {0, -2},
                        {0, -1}, {0, 1},  {0, 2},  {-1, -1}, {1, 1}};
  std::vector<int> offsets;
  for (const auto& mv : moves) offsets.push_back(mv.di + mv.dj * i1);

  SupLinearSystem sys;
  sys.controls = problem.controls;
  sys.t = t_k;
  sys.tau = tau;
  sys.h = std::min(hx, hy);

  for (double a : problem.controls) {
    BandedMatrix m(n, offsets);
    std::vector<double> q = history;
    for (int j = 1; j <= i2; ++j) {
      for (int i = 1; i <= i1; ++i) {
        const int p = (j - 1) * i1 + (i - 1);
        const double x = grid.x.node(i);
        const double y = grid.y.node(j);
        const double s1 = problem.sigma1(t_k, x, y, a);
        const double s2 = problem.sigma2(t_k, x, y, a);
        const double rho = problem.rho(t_k, x, y, a);
        const double b1 = problem.drift1(t_k, x, y, a);
        const double b2 = problem.drift2(t_k, x, y, a);
        const double r = problem.discount(t_k, x, y, a);
        const double ell = problem.source(t_k, x, y, a);
        require_finite(s1, "sigma1", t_k, x, a);
        require_finite(s2, "sigma2", t_k, x, a);
        require_finite(rho, "rho", t_k, x, a);
        require_finite(b1, "drift1", t_k, x, a);
        require_finite(b2, "drift2", t_k, x, a);
        require_finite(r, "discount", t_k, x, a);
        require_finite(ell, "source", t_k, x, a);
        const Stencil2DCoeffs sc = stencil_coefficients_2d(s1, s2, rho, hx, hy);

        // Operator coefficient for each (di, dj) move.
        auto op_coeff = [&](int di, int dj) -> double {
          double v = 0.0;
          // -1/2 of the second-order term, split into undivided differences.
          if (di == 0 && dj == 0) v += sc.alpha + sc.beta + sc.gamma + r;
          if (std::abs(di) == 1 && dj == 0) v += -0.5 * sc.alpha;
          if (di == 0 && std::abs(dj) == 1) v += -0.5 * sc.beta;
          if (di == dj && std::abs(di) == 1) v += -0.5 * sc.gamma;
          // Upwind drift in each axis.
          const double b1p = std::max(b1, 0.0), b1m = std::max(-b1, 0.0);
          const double b2p = std::max(b2, 0.0), b2m = std::max(-b2, 0.0);
          if (dj == 0) {
            if (di == 0) v += 3.0 * (b1p + b1m) / (2.0 * hx);
            if (di == -1) v += -4.0 * b1p / (2.0 * hx);
            if (di == -2) v += b1p / (2.0 * hx);
            if (di == 1) v += -4.0 * b1m / (2.0 * hx);
            if (di == 2) v += b1m / (2.0 * hx);
          }
          if (di == 0) {
            if (dj == 0) v += 3.0 * (b2p + b2m) / (2.0 * hy);
            if (dj == -1) v += -4.0 * b2p / (2.0 * hy);
            if (dj == -2) v += b2p / (2.0 * hy);
            if (dj == 1) v += -4.0 * b2m / (2.0 * hy);
            if (dj == 2) v += b2m / (2.0 * hy);
          }
          return v;
        };

        q[static_cast<size_t>(p)] -= tau * ell;
        for (const auto& mv : moves) {
          double coeff = tau * op_coeff(mv.di, mv.dj);
          if (mv.di == 0 && mv.dj == 0) coeff += lead;
          if (coeff == 0.0) continue;
          const int ti = i + mv.di;
          const int tj = j + mv.dj;
          if (ti >= 1 && ti <= i1 && tj >= 1 && tj <= i2) {
            m.at(p, mv.di + mv.dj * i1) += coeff;
          } else {
            const double bv = problem.boundary(t_k, grid.x.node(ti), grid.y.node(tj));
            q[static_cast<size_t>(p)] -= coeff * bv;
          }
        }
      }
    }
    sys.matrices.push_back(std::move(m));
    sys.rhs.push_back(std::move(q));
  }
  return sys;
}

void dump_banded(std::ostream& os, const BandedMatrix& m) {
  for (int i = 0; i < m.size(); ++i) {
    os << i;
    for (int o : m.offsets()) {
      const int col = i + o;
      if (col < 0 || col >= m.size()) continue;
      const double v = m.get(i, o);
      if (v != 0.0) os << ' ' << o << ':' << v;
    }
    os << '\n';
  }
}

}  // namespace hjb
