#include "hjb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hjb/fd_ops.hpp"

namespace hjb {

double norm(std::span<const double> u, NormKind kind, double h) {
  if (!(h > 0)) throw std::invalid_argument("norm: h must be > 0");
  switch (kind) {
    case NormKind::sup: {
      double m = 0.0;
      for (double v : u) m = std::max(m, std::abs(v));
      return m;
    }
    case NormKind::euclidean:
    case NormKind::l2_rescaled: {
      double s = 0.0;
      for (double v : u) s += v * v;
      const double e = std::sqrt(s);
      return kind == NormKind::euclidean ? e : e * std::sqrt(h);
    }
    case NormKind::a_norm:
    case NormKind::h1_rescaled: {
      // Zero extension at both walls: I+1 gaps.
      double s = 0.0;
      double prev = 0.0;
      for (double v : u) {
        const double d = (v - prev) / h;
        s += d * d;
        prev = v;
      }
      const double d = (0.0 - prev) / h;
      s += d * d;
      const double e = std::sqrt(s);
      return kind == NormKind::a_norm ? e : e * std::sqrt(h);
    }
  }
  throw std::invalid_argument("norm: unknown kind");
}

double a_matrix_lambda_min(int interior_count, double h) {
  if (interior_count < 1 || !(h > 0)) {
    throw std::invalid_argument("a_matrix_lambda_min: bad arguments");
  }
  const double length = h * static_cast<double>(interior_count + 1);
  const double s = std::sin(M_PI * h / (2.0 * length));
  return 4.0 / (h * h) * s * s;
}

ErrorVsExact error_vs_exact(const Trajectory& traj, const ExactFn& exact, NormKind kind,
                            int first_level) {
  if (!exact) throw std::invalid_argument("error_vs_exact: no exact solution");
  if (static_cast<int>(traj.levels.size()) != traj.time.steps + 1) {
    throw std::invalid_argument("error_vs_exact: trajectory does not store all levels");
  }
  ErrorVsExact out;
  const int n = traj.grid.interior_count;
  std::vector<double> e(static_cast<size_t>(n));
  for (int k = first_level; k <= traj.time.steps; ++k) {
    const double t = traj.time.t(k);
    const auto& u = traj.levels[static_cast<size_t>(k)];
    for (int i = 1; i <= n; ++i) {
      e[static_cast<size_t>(i - 1)] = u[static_cast<size_t>(i - 1)] - exact(t, traj.grid.node(i));
    }
    const double v = norm(e, kind, traj.grid.h);
    if (v > out.value || out.worst_level < 0) {
      out.value = v;
      out.worst_level = k;
    }
  }
  return out;
}

double error_vs_reference(const Trajectory& traj, const Trajectory& reference, NormKind kind) {
  const int coarse = traj.grid.interior_count + 1;
  const int fine = reference.grid.interior_count + 1;
  if (fine % coarse != 0) {
    throw std::invalid_argument(
        "error_vs_reference: reference intervals must be a multiple of the coarse ones");
  }
  if (traj.grid.x_min != reference.grid.x_min || traj.grid.x_max != reference.grid.x_max) {
    throw std::invalid_argument("error_vs_reference: domain mismatch");
  }
  const int stride = fine / coarse;
  const auto& u = traj.levels.back();
  const auto& r = reference.levels.back();
  std::vector<double> e(static_cast<size_t>(traj.grid.interior_count));
  for (int i = 1; i <= traj.grid.interior_count; ++i) {
    e[static_cast<size_t>(i - 1)] =
        u[static_cast<size_t>(i - 1)] - r[static_cast<size_t>(i * stride - 1)];
  }
  return norm(e, kind, traj.grid.h);
}

std::vector<double> consistency_error(SchemeTag scheme, const SmoothFunction& phi,
                                      const HJBProblem& problem, const Grid1D& grid,
                                      const TimeGrid& time, int k) {
  const int min_k = scheme == SchemeTag::bdf2 ? 2 : 1;
  if (k < min_k || k > time.steps) {
    throw std::invalid_argument("consistency_error: level outside the scheme's range");
  }
  const int n = grid.interior_count;
  const double tau = time.tau;
  const double t_k = time.t(k);

  auto sample_padded = [&](double t) {
    std::vector<double> p(static_cast<size_t>(grid.padded_size()));
    for (int i = -1; i <= n + 2; ++i) {
      p[static_cast<size_t>(Grid1D::pad(i))] = phi.value(t, grid.node(i));
    }
    return p;
  };

  const std::vector<double> cur = sample_padded(t_k);
  std::vector<double> discrete(static_cast<size_t>(n));

  if (scheme == SchemeTag::crank_nicolson) {
    const double t_prev = time.t(k - 1);
    const std::vector<double> prev = sample_padded(t_prev);
    const std::vector<double> h_cur = hamiltonian_apply(problem, grid, t_k, cur);
    const std::vector<double> h_prev = hamiltonian_apply(problem, grid, t_prev, prev);
    for (int i = 1; i <= n; ++i) {
      const int p = Grid1D::pad(i);
      const size_t q = static_cast<size_t>(i - 1);
      discrete[q] = (cur[static_cast<size_t>(p)] - prev[static_cast<size_t>(p)]) / tau +
                    0.5 * h_cur[q] + 0.5 * h_prev[q];
    }
  } else {
    const std::vector<double> h_cur = hamiltonian_apply(problem, grid, t_k, cur);
    for (int i = 1; i <= n; ++i) {
      const int p = Grid1D::pad(i);
      const size_t q = static_cast<size_t>(i - 1);
      const double x = grid.node(i);
      double dt_term;
      if (scheme == SchemeTag::bdf2) {
        dt_term = (3.0 * cur[static_cast<size_t>(p)] - 4.0 * phi.value(t_k - tau, x) +
                   phi.value(t_k - 2.0 * tau, x)) /
                  (2.0 * tau);
      } else {
        dt_term = (cur[static_cast<size_t>(p)] - phi.value(t_k - tau, x)) / tau;
      }
      discrete[q] = dt_term + h_cur[q];
    }
  }

  for (int i = 1; i <= n; ++i) {
    const double x = grid.node(i);
    double ham = -std::numeric_limits<double>::infinity();
    for (double a : problem.controls) {
      const double s = problem.sigma(t_k, x, a);
      const double v = -0.5 * s * s * phi.dxx(t_k, x) +
                       problem.drift(t_k, x, a) * phi.dx(t_k, x) +
                       problem.discount(t_k, x, a) * phi.value(t_k, x) +
                       problem.source(t_k, x, a);
      ham = std::max(ham, v);
    }
    discrete[static_cast<size_t>(i - 1)] -= phi.dt(t_k, x) + ham;
  }
  return discrete;
}

ConvergenceTable convergence_table(const LevelRunner& runner, const Ladder& ladder,
                                   std::vector<NormKind> norms) {
  if (ladder.levels < 1 || ladder.n0 < 1 || ladder.i0_plus_1 < 2) {
    throw std::invalid_argument("convergence_table: bad ladder");
  }
  ConvergenceTable table;
  table.norms = std::move(norms);
  const size_t nn = table.norms.size();
  for (int l = 0; l < ladder.levels; ++l) {
    TableRow row;
    row.n_steps = ladder.n0 << l;
    row.i_plus_1 = ladder.i0_plus_1 << l;
    const LevelResult res = runner(row.n_steps, row.i_plus_1);
    if (res.errors.size() != nn) {
      throw std::runtime_error("convergence_table: runner returned wrong number of errors");
    }
    row.errors = res.errors;
    row.cpu_seconds = res.cpu_seconds;
    row.orders.assign(nn, std::numeric_limits<double>::quiet_NaN());
    if (l > 0) {
      const TableRow& prev = table.rows.back();
      for (size_t j = 0; j < nn; ++j) {
        if (prev.errors[j] > 0.0 && row.errors[j] > 0.0) {
          row.orders[j] = std::log2(prev.errors[j] / row.errors[j]);
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

StabilityCoefficients stability_coefficients(double C, double tau, int count) {
  if (!(tau > 0) || count < 1) {
    throw std::invalid_argument("stability_coefficients: bad arguments");
  }
  const double ct = C * tau;
  if (!(ct < 3.0)) {
    throw std::invalid_argument("stability_coefficients: requires C * tau < 3");
  }
  StabilityCoefficients out;
  const double root = std::sqrt(1.0 + ct);
  out.lambda1 = 2.0 + root;
  out.lambda2 = 2.0 - root;
  out.bound = 1.5 * std::exp(2.0 * C * static_cast<double>(count) * tau);

  out.a.resize(static_cast<size_t>(count));
  for (int p = 0; p < count; ++p) {
    double s = 0.0;
    for (int j = 0; j <= p; ++j) {
      s += std::pow(out.lambda1, -(j + 1)) * std::pow(out.lambda2, -(p - j + 1));
    }
    out.a[static_cast<size_t>(p)] = s;
  }

  // Same weights from the recurrence (3 - C tau) a_p = 4 a_{p-1} - a_{p-2}.
  out.a_direct.resize(static_cast<size_t>(count));
  const double d = 3.0 - ct;
  for (int p = 0; p < count; ++p) {
    double v;
    if (p == 0) {
      v = 1.0 / d;
    } else if (p == 1) {
      v = 4.0 * out.a_direct[0] / d;
    } else {
      v = (4.0 * out.a_direct[static_cast<size_t>(p - 1)] -
           out.a_direct[static_cast<size_t>(p - 2)]) /
          d;
    }
    out.a_direct[static_cast<size_t>(p)] = v;
  }
  return out;
}

double oscillation_metric(std::span<const double> interior) {
  double m = 0.0;
  for (size_t i = 1; i + 1 < interior.size(); ++i) {
    m = std::max(m, std::abs(interior[i - 1] - 2.0 * interior[i] + interior[i + 1]));
  }
  return m;
}

}  // namespace hjb
