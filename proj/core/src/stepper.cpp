#include "hjb/stepper.hpp"

#include <algorithm>
#include <cmath>

namespace hjb {

namespace {

std::vector<double> sample_initial(const InitialFn& initial, const Grid1D& grid) {
  std::vector<double> u(static_cast<size_t>(grid.interior_count));
  for (int i = 1; i <= grid.interior_count; ++i) {
    u[static_cast<size_t>(i - 1)] = initial(grid.node(i));
  }
  return u;
}

double drift_sup_1d(const Coeff1D& drift, const std::vector<double>& controls,
                    const Grid1D& grid, double t) {
  double m = 0.0;
  for (double a : controls) {
    for (int i = -1; i <= grid.interior_count + 2; ++i) {
      m = std::max(m, std::abs(drift(t, grid.node(i), a)));
    }
  }
  return m;
}

// Rolling window over the most recent levels; back(1) is u^{k-1}.
class History {
 public:
  void push(std::vector<double> level) {
    recent_.push_back(std::move(level));
    if (recent_.size() > 4) recent_.erase(recent_.begin());
  }
  const std::vector<double>& back(int j) const {
    return recent_[recent_.size() - static_cast<size_t>(j)];
  }
  int depth() const { return static_cast<int>(recent_.size()); }

 private:
  std::vector<std::vector<double>> recent_;
};

// Extrapolated initial guess for the sweep; exact history up to the local
// truncation order, so near-converged from the first sweep.
std::vector<double> warm_start(const History& hist) {
  const size_t n = hist.back(1).size();
  std::vector<double> g(n);
  if (hist.depth() >= 3) {
    const auto& u1 = hist.back(1);
    const auto& u2 = hist.back(2);
    const auto& u3 = hist.back(3);
    for (size_t i = 0; i < n; ++i) g[i] = 3.0 * u1[i] - 3.0 * u2[i] + u3[i];
  } else if (hist.depth() == 2) {
    const auto& u1 = hist.back(1);
    const auto& u0 = hist.back(2);
    for (size_t i = 0; i < n; ++i) g[i] = 2.0 * u1[i] - u0[i];
  } else {
    g = hist.back(1);
  }
  return g;
}

StepRecord solve_step(const SupLinearSystem& sys, const SolveOptions& opts,
                      std::span<const double> guess, int k, double cfl_bound,
                      double b_sup, double tau, double h, std::vector<double>& out) {
  StepRecord rec;
  rec.k = k;
  rec.t = sys.t;
  const CflCheck cfl = check_cfl(b_sup, tau, h, cfl_bound);
  rec.cfl_ratio = cfl.ratio;
  rec.cfl_ok = cfl.ok;
  rec.certificate_ratio = certificate(sys).ratio;
  out = solve_sup(sys, opts, guess, &rec.solve);
  return rec;
}

Trajectory run_multistep(const HJBProblem& problem, const Grid1D& grid, const TimeGrid& time,
                         const StepperOptions& opts, SchemeTag scheme) {
  Trajectory traj;
  traj.grid = grid;
  traj.time = time;
  traj.scheme = scheme;
  traj.steps.reserve(static_cast<size_t>(time.steps));

  History hist;
  hist.push(sample_initial(problem.initial, grid));
  if (opts.store_levels) {
    traj.levels.reserve(static_cast<size_t>(time.steps + 1));
  }
  traj.levels.push_back(hist.back(1));

  const bool bdf2_after_start = scheme == SchemeTag::bdf2;
  const double tau = time.tau;

  // Reusable operators when the coefficients do not depend on t.
  AssembledOperator euler_op, bdf2_op;
  bool have_euler_op = false, have_bdf2_op = false;
  double b_sup_cached = -1.0;

  for (int k = 1; k <= time.steps; ++k) {
    const double t_k = time.t(k);
    const bool use_bdf2 = bdf2_after_start && k >= 2;
    const StepMode mode = use_bdf2 ? StepMode::bdf2 : StepMode::euler;

    const AssembledOperator* op = nullptr;
    AssembledOperator local;
    if (problem.time_invariant) {
      if (mode == StepMode::euler) {
        if (!have_euler_op) {
          euler_op = assemble_operator(problem, grid, t_k, tau, mode);
          have_euler_op = true;
        }
        op = &euler_op;
      } else {
        if (!have_bdf2_op) {
          bdf2_op = assemble_operator(problem, grid, t_k, tau, mode);
          have_bdf2_op = true;
        }
        op = &bdf2_op;
      }
    } else {
      local = assemble_operator(problem, grid, t_k, tau, mode);
      op = &local;
    }

    const std::vector<double>& u_prev = hist.back(1);
    static const std::vector<double> empty;
    const std::vector<double>& u_prev2 = use_bdf2 ? hist.back(2) : empty;
    const SupLinearSystem sys = make_step_system(*op, problem, grid, t_k, u_prev, u_prev2);

    double b_sup;
    if (problem.time_invariant) {
      if (b_sup_cached < 0.0) b_sup_cached = drift_sup_1d(problem.drift, problem.controls, grid, t_k);
      b_sup = b_sup_cached;
    } else {
      b_sup = drift_sup_1d(problem.drift, problem.controls, grid, t_k);
    }

    const std::vector<double> guess = warm_start(hist);
    std::vector<double> u_k;
    traj.steps.push_back(solve_step(sys, opts.solver, guess, k,
                                    use_bdf2 ? kCflBoundBdf2 : kCflBoundEuler, b_sup, tau,
                                    grid.h, u_k));
    hist.push(std::move(u_k));
    if (opts.store_levels) {
      traj.levels.push_back(hist.back(1));
    } else if (k == time.steps) {
      traj.levels.push_back(hist.back(1));
    }
  }
  return traj;
}

// warm_start over fully stored levels.
std::vector<double> warm_start_levels(const std::vector<std::vector<double>>& levels, int k) {
  History h;
  for (int j = std::max(0, k - 3); j <= k - 1; ++j) h.push(levels[static_cast<size_t>(j)]);
  return warm_start(h);
}

std::vector<double> pad_level(const std::vector<double>& interior, const Grid1D& grid,
                              double t, const HJBProblem& problem, bool use_initial) {
  std::vector<double> padded(static_cast<size_t>(grid.padded_size()));
  const int n = grid.interior_count;
  for (int gi : {-1, 0, n + 1, n + 2}) {
    const double x = grid.node(gi);
    padded[static_cast<size_t>(Grid1D::pad(gi))] =
        use_initial ? problem.initial(x) : problem.boundary(t, x);
  }
  for (int gi = 1; gi <= n; ++gi) {
    padded[static_cast<size_t>(Grid1D::pad(gi))] = interior[static_cast<size_t>(gi - 1)];
  }
  return padded;
}

}  // namespace

Trajectory run_bdf2(const HJBProblem& problem, const Grid1D& grid, const TimeGrid& time,
                    const StepperOptions& opts) {
  return run_multistep(problem, grid, time, opts, SchemeTag::bdf2);
}

Trajectory run_implicit_euler(const HJBProblem& problem, const Grid1D& grid,
                              const TimeGrid& time, const StepperOptions& opts) {
  return run_multistep(problem, grid, time, opts, SchemeTag::implicit_euler);
}

Trajectory run_crank_nicolson(const HJBProblem& problem, const Grid1D& grid,
                              const TimeGrid& time, const StepperOptions& opts) {
  Trajectory traj;
  traj.grid = grid;
  traj.time = time;
  traj.scheme = SchemeTag::crank_nicolson;
  traj.levels.reserve(static_cast<size_t>(time.steps + 1));
  traj.levels.push_back(sample_initial(problem.initial, grid));
  traj.steps.reserve(static_cast<size_t>(time.steps));

  for (int k = 1; k <= time.steps; ++k) {
    const double t_k = time.t(k);
    const double t_prev = time.t(k - 1);
    // Ghost values at t_0 come from the initial datum; later levels from the
    // boundary data.
    const std::vector<double> prev_padded =
        pad_level(traj.levels[static_cast<size_t>(k - 1)], grid, t_prev, problem, k == 1);
    const SupLinearSystem sys = assemble_cn_system(problem, grid, t_k, time.tau, prev_padded);

    const double b_sup = drift_sup_1d(problem.drift, problem.controls, grid, t_k);
    const std::vector<double> guess = warm_start_levels(traj.levels, k);
    std::vector<double> u_k;
    traj.steps.push_back(solve_step(sys, opts.solver, guess, k, kCflBoundEuler, b_sup,
                                    time.tau, grid.h, u_k));
    traj.levels.push_back(std::move(u_k));
  }
  return traj;
}

Trajectory run_isaacs(const IsaacsProblem& problem, const Grid1D& grid, const TimeGrid& time,
                      const StepperOptions& opts) {
  Trajectory traj;
  traj.grid = grid;
  traj.time = time;
  traj.scheme = SchemeTag::bdf2;
  traj.levels.reserve(static_cast<size_t>(time.steps + 1));
  traj.levels.push_back(sample_initial(problem.initial, grid));
  traj.steps.reserve(static_cast<size_t>(time.steps));

  for (int k = 1; k <= time.steps; ++k) {
    const double t_k = time.t(k);
    const bool use_bdf2 = k >= 2;
    const StepMode mode = use_bdf2 ? StepMode::bdf2 : StepMode::euler;
    static const std::vector<double> empty;
    const SupInfLinearSystem sys = assemble_step_system_isaacs(
        problem, grid, t_k, time.tau, traj.levels[static_cast<size_t>(k - 1)],
        use_bdf2 ? traj.levels[static_cast<size_t>(k - 2)] : empty, mode);

    double b_sup = 0.0;
    for (double a : problem.controls_sup) {
      for (double b : problem.controls_inf) {
        for (int i = -1; i <= grid.interior_count + 2; ++i) {
          b_sup = std::max(b_sup, std::abs(problem.drift(t_k, grid.node(i), a, b)));
        }
      }
    }

    StepRecord rec;
    rec.k = k;
    rec.t = t_k;
    const CflCheck cfl =
        check_cfl(b_sup, time.tau, grid.h, use_bdf2 ? kCflBoundBdf2 : kCflBoundEuler);
    rec.cfl_ratio = cfl.ratio;
    rec.cfl_ok = cfl.ok;
    rec.certificate_ratio = certificate(sys).ratio;
    const std::vector<double> guess = warm_start_levels(traj.levels, k);
    traj.levels.push_back(solve_supinf(sys, opts.solver, guess, &rec.solve));
    traj.steps.push_back(rec);
  }
  return traj;
}

Trajectory2D run_bdf2_2d(const HJBProblem2D& problem, const Grid2D& grid, const TimeGrid& time,
                         const StepperOptions& opts) {
  Trajectory2D traj;
  traj.grid = grid;
  traj.time = time;
  traj.scheme = SchemeTag::bdf2;
  const int i1 = grid.x.interior_count;
  const int i2 = grid.y.interior_count;

  std::vector<double> u0(static_cast<size_t>(i1) * static_cast<size_t>(i2));
  for (int j = 1; j <= i2; ++j) {
    for (int i = 1; i <= i1; ++i) {
      u0[static_cast<size_t>((j - 1) * i1 + (i - 1))] =
          problem.initial(grid.x.node(i), grid.y.node(j));
    }
  }
  traj.levels.reserve(static_cast<size_t>(time.steps + 1));
  traj.levels.push_back(std::move(u0));
  traj.steps.reserve(static_cast<size_t>(time.steps));

  for (int k = 1; k <= time.steps; ++k) {
    const double t_k = time.t(k);
    const bool use_bdf2 = k >= 2;
    const StepMode mode = use_bdf2 ? StepMode::bdf2 : StepMode::euler;
    static const std::vector<double> empty;
    const SupLinearSystem sys = assemble_step_system_2d(
        problem, grid, t_k, time.tau, traj.levels[static_cast<size_t>(k - 1)],
        use_bdf2 ? traj.levels[static_cast<size_t>(k - 2)] : empty, mode);

    double b_sup = 0.0;
    for (double a : problem.controls) {
      for (int j = -1; j <= i2 + 2; ++j) {
        for (int i = -1; i <= i1 + 2; ++i) {
          const double x = grid.x.node(i);
          const double y = grid.y.node(j);
          b_sup = std::max(b_sup, std::abs(problem.drift1(t_k, x, y, a)));
          b_sup = std::max(b_sup, std::abs(problem.drift2(t_k, x, y, a)));
        }
      }
    }

    StepRecord rec;
    rec.k = k;
    rec.t = t_k;
    const CflCheck cfl = check_cfl(b_sup, time.tau, std::min(grid.x.h, grid.y.h),
                                   use_bdf2 ? kCflBoundBdf2 : kCflBoundEuler);
    rec.cfl_ratio = cfl.ratio;
    rec.cfl_ok = cfl.ok;
    rec.certificate_ratio = certificate(sys).ratio;
    const std::vector<double> guess = warm_start_levels(traj.levels, k);
    std::vector<double> u_k;
    rec.solve = SolveStats{};
    u_k = solve_sup(sys, opts.solver, guess, &rec.solve);
    traj.levels.push_back(std::move(u_k));
    traj.steps.push_back(rec);
  }
  return traj;
}

}  // namespace hjb
