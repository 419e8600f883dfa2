#include "hjb/sup_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjb {

namespace {

Certificate certificate_impl(const std::vector<BandedMatrix>& matrices) {
  Certificate cert;
  cert.feasible = true;
  for (size_t c = 0; c < matrices.size(); ++c) {
    const BandedMatrix& m = matrices[c];
    const int n = m.size();
    for (int i = 0; i < n; ++i) {
      double left = 0.0, right = 0.0, diag = 0.0;
      for (int o : m.offsets()) {
        const int col = i + o;
        if (col < 0 || col >= n) continue;
        const double v = m.get(i, o);
        if (o < 0) left += std::abs(v);
        else if (o > 0) right += std::abs(v);
        else diag = std::abs(v);
      }
      const double denom = diag - left;
      double ratio;
      if (denom <= 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        ratio = right / denom;
      }
      if (ratio > cert.ratio || cert.worst_row < 0) {
        cert.ratio = ratio;
        cert.worst_row = i;
        cert.worst_control = static_cast<int>(c);
      }
      if (!(ratio < 1.0)) cert.feasible = false;
    }
  }
  return cert;
}

void require_feasible(const Certificate& cert, const char* what) {
  if (!cert.feasible) {
    std::ostringstream os;
    os << what << ": diagonal-dominance certificate failed (ratio=" << cert.ratio
       << " at row " << cert.worst_row << ", control " << cert.worst_control << ")";
    throw InfeasibleSystem(os.str(), cert);
  }
}

// Flattened view of one control's matrix for the inner sweep: diagonal
// pointers resolved once instead of per entry.
struct SweepView {
  struct OffDiag {
    int offset;
    const double* diag;
  };
  std::vector<OffDiag> off;
  const double* diag0 = nullptr;
  const double* q = nullptr;
  int n = 0;
};

SweepView make_sweep_view(const BandedMatrix& m, const std::vector<double>& q) {
  SweepView v;
  v.n = m.size();
  v.diag0 = m.diagonal(0).data();
  v.q = q.data();
  for (int o : m.offsets()) {
    if (o != 0) v.off.push_back({o, m.diagonal(o).data()});
  }
  return v;
}

// (q_i - sum_{j != i} M_ij x_j) / M_ii over in-range columns.
inline double gs_candidate(const SweepView& v, const double* x, int i) {
  double acc = v.q[i];
  for (const auto& od : v.off) {
    const int col = i + od.offset;
    if (col < 0 || col >= v.n) continue;
    acc -= od.diag[i] * x[col];
  }
  return acc / v.diag0[i];
}

double sup_residual_inf(const std::vector<BandedMatrix>& matrices,
                        const std::vector<std::vector<double>>& rhs,
                        const std::vector<double>& x) {
  const int n = matrices.front().size();
  std::vector<double> worst(static_cast<size_t>(n), -std::numeric_limits<double>::infinity());
  for (size_t c = 0; c < matrices.size(); ++c) {
    const std::vector<double> mx = matrices[c].apply(x);
    for (int i = 0; i < n; ++i) {
      worst[static_cast<size_t>(i)] =
          std::max(worst[static_cast<size_t>(i)], mx[static_cast<size_t>(i)] - rhs[c][static_cast<size_t>(i)]);
    }
  }
  double r = 0.0;
  for (double v : worst) r = std::max(r, std::abs(v));
  return r;
}

// Generic sweep loop shared by the one- and two-player solvers.  `update`
// computes the new value of x_i from the current state.
template <typename Update, typename Residual>
std::vector<double> iterate(int n, const SolveOptions& opts, double cert_ratio,
                            std::span<const double> initial, Update update,
                            Residual residual, SolveStats* stats, const char* what) {
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  if (!initial.empty()) {
    if (static_cast<int>(initial.size()) != n) {
      throw std::invalid_argument(std::string(what) + ": initial guess size mismatch");
    }
    std::copy(initial.begin(), initial.end(), x.begin());
  }

  SolveStats st;
  const double change_tol = opts.tol * (1.0 - cert_ratio);
  double prev_change = -1.0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double next = update(i, x);
      change = std::max(change, std::abs(next - x[static_cast<size_t>(i)]));
      x[static_cast<size_t>(i)] = next;
    }
    st.iterations = iter;
    double xn = 0.0;
    for (double v : x) xn = std::max(xn, std::abs(v));
    if (prev_change > 1e-13 * (1.0 + xn)) {
      st.contraction_estimate = std::max(st.contraction_estimate, change / prev_change);
    }
    prev_change = change;
    // The change bound can sink below roundoff for strongly stiff systems
    // (ratio close to 1), so the residual is also polled periodically.
    if (change <= change_tol || iter % 64 == 0) {
      st.final_residual_inf = residual(x);
      if (st.final_residual_inf <= opts.tol) {
        if (stats) *stats = st;
        return x;
      }
    }
  }
  st.final_residual_inf = residual(x);
  if (stats) *stats = st;
  std::ostringstream os;
  os << what << ": no convergence in " << opts.max_iter
     << " sweeps (residual=" << st.final_residual_inf << ")";
  throw ConvergenceFailure(os.str(), st);
}

}  // namespace

Certificate certificate(const SupLinearSystem& sys) { return certificate_impl(sys.matrices); }

Certificate certificate(const SupInfLinearSystem& sys) { return certificate_impl(sys.matrices); }

std::vector<double> solve_sup(const SupLinearSystem& sys, const SolveOptions& opts,
                              std::span<const double> initial, SolveStats* stats) {
  if (sys.matrices.empty()) throw std::invalid_argument("solve_sup: empty system");
  const Certificate cert = certificate(sys);
  require_feasible(cert, "solve_sup");
  const int n = sys.size();

  std::vector<SweepView> views;
  views.reserve(sys.matrices.size());
  for (size_t c = 0; c < sys.matrices.size(); ++c) {
    views.push_back(make_sweep_view(sys.matrices[c], sys.rhs[c]));
  }
  auto update = [&](int i, const std::vector<double>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const SweepView& v : views) best = std::min(best, gs_candidate(v, x.data(), i));
    return best;
  };
  auto residual = [&](const std::vector<double>& x) {
    return sup_residual_inf(sys.matrices, sys.rhs, x);
  };
  return iterate(n, opts, cert.ratio, initial, update, residual, stats, "solve_sup");
}

std::vector<double> solve_supinf(const SupInfLinearSystem& sys, const SolveOptions& opts,
                                 std::span<const double> initial, SolveStats* stats) {
  if (sys.matrices.empty()) throw std::invalid_argument("solve_supinf: empty system");
  const Certificate cert = certificate(sys);
  require_feasible(cert, "solve_supinf");
  const int n = sys.size();
  const size_t na = sys.controls_sup.size();
  const size_t nb = sys.controls_inf.size();

  std::vector<SweepView> views;
  views.reserve(sys.matrices.size());
  for (size_t c = 0; c < sys.matrices.size(); ++c) {
    views.push_back(make_sweep_view(sys.matrices[c], sys.rhs[c]));
  }
  auto update = [&](int i, const std::vector<double>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < na; ++a) {
      double inner = -std::numeric_limits<double>::infinity();
      for (size_t b = 0; b < nb; ++b) {
        inner = std::max(inner, gs_candidate(views[a * nb + b], x.data(), i));
      }
      best = std::min(best, inner);
    }
    return best;
  };
  // The residual mirrors the fixed point: max over the outer player of the
  // inner player's minimum, per row.
  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> worst(static_cast<size_t>(n), -std::numeric_limits<double>::infinity());
    for (size_t a = 0; a < na; ++a) {
      std::vector<double> inner(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
      for (size_t b = 0; b < nb; ++b) {
        const size_t c = a * nb + b;
        const std::vector<double> mx = sys.matrices[c].apply(x);
        for (int i = 0; i < n; ++i) {
          inner[static_cast<size_t>(i)] = std::min(
              inner[static_cast<size_t>(i)], mx[static_cast<size_t>(i)] - sys.rhs[c][static_cast<size_t>(i)]);
        }
      }
      for (int i = 0; i < n; ++i) {
        worst[static_cast<size_t>(i)] = std::max(worst[static_cast<size_t>(i)], inner[static_cast<size_t>(i)]);
      }
    }
    double r = 0.0;
    for (double v : worst) r = std::max(r, std::abs(v));
    return r;
  };
  return iterate(n, opts, cert.ratio, initial, update, residual, stats, "solve_supinf");
}

std::vector<double> solve_direct_single_control(const BandedMatrix& m,
                                                std::span<const double> q) {
  const int n = m.size();
  if (static_cast<int>(q.size()) != n) {
    throw std::invalid_argument("solve_direct_single_control: rhs size mismatch");
  }
  int kl = 0, ku = 0;
  for (int o : m.offsets()) {
    kl = std::max(kl, -o);
    ku = std::max(ku, o);
  }
  const int kw = kl + ku;  // upper bandwidth after fill-in
  const int ldab = 2 * kl + ku + 1;
  std::vector<double> ab(static_cast<size_t>(ldab) * static_cast<size_t>(n), 0.0);
  // Column-aligned band storage: A(i, j) lives at ab[(i - j) + kl + ku][j].
  auto a = [&](int i, int j) -> double& {
    return ab[static_cast<size_t>((i - j) + kl + ku) * static_cast<size_t>(n) +
              static_cast<size_t>(j)];
  };
  for (int i = 0; i < n; ++i) {
    for (int o : m.offsets()) {
      const int j = i + o;
      if (j < 0 || j >= n) continue;
      a(i, j) = m.get(i, o);
    }
  }

  std::vector<int> piv(static_cast<size_t>(n));
  std::vector<double> b(q.begin(), q.end());
  for (int k = 0; k < n; ++k) {
    const int last_row = std::min(n - 1, k + kl);
    int p = k;
    for (int i = k + 1; i <= last_row; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    piv[static_cast<size_t>(k)] = p;
    const int last_col = std::min(n - 1, k + kw);
    if (p != k) {
      for (int j = k; j <= last_col; ++j) std::swap(a(k, j), a(p, j));
    }
    const double pivot = a(k, k);
    if (std::abs(pivot) < 1e-300) {
      throw std::runtime_error("solve_direct_single_control: singular matrix");
    }
    for (int i = k + 1; i <= last_row; ++i) {
      const double mult = a(i, k) / pivot;
      a(i, k) = mult;
      for (int j = k + 1; j <= last_col; ++j) a(i, j) -= mult * a(k, j);
    }
  }
  // Forward substitution with the recorded row interchanges.
  for (int k = 0; k < n; ++k) {
    std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(piv[static_cast<size_t>(k)])]);
    const int last_row = std::min(n - 1, k + kl);
    for (int i = k + 1; i <= last_row; ++i) {
      b[static_cast<size_t>(i)] -= a(i, k) * b[static_cast<size_t>(k)];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    const int last_col = std::min(n - 1, i + kw);
    double acc = b[static_cast<size_t>(i)];
    for (int j = i + 1; j <= last_col; ++j) acc -= a(i, j) * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(i)] = acc / a(i, i);
  }
  return b;
}

}  // namespace hjb
