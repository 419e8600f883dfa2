#include "hjb/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjb {

namespace {

double bump(double x) {
  const double w = std::max(0.0, 1.0 - x * x);
  return w * w * w * w;
}

}  // namespace

HJBProblem eikonal_problem() {
  HJBProblem p;
  p.name = "eikonal";
  p.controls = {-1.0, 1.0};
  p.sigma = [](double, double, double) { return 0.0; };
  p.drift = [](double, double, double a) { return a; };
  p.discount = [](double, double, double) { return 0.0; };
  p.source = [](double, double, double) { return 0.0; };
  p.initial = [](double x) { return bump(x); };
  p.boundary = [](double, double) { return 0.0; };
  p.exact = [](double t, double x) { return std::min(bump(x - t), bump(x + t)); };
  p.time_invariant = true;
  p.x_min = -2.0;
  p.x_max = 2.0;
  p.horizon = 0.2;
  return p;
}

HJBProblem eikonal_problem_negative() {
  HJBProblem p = eikonal_problem();
  p.name = "eikonal-neg";
  p.initial = [](double x) { return -bump(x); };
  // Minimum over the cone of dependence |y - x| <= t of -v0(y): the window
  // point closest to the origin attains it.
  p.exact = [](double t, double x) { return -bump(std::max(std::abs(x) - t, 0.0)); };
  return p;
}

HJBProblem controlled_diffusion_problem() {
  HJBProblem p;
  p.name = "controlled-diffusion";
  p.controls = {0.1, 0.5};
  p.sigma = [](double, double, double a) { return a; };
  p.drift = [](double, double, double) { return 0.0; };
  p.discount = [](double, double, double) { return 0.0; };
  p.source = [](double, double, double) { return 0.0; };
  p.initial = [](double x) { return std::sin(M_PI * x); };
  p.boundary = [](double, double) { return 0.0; };
  p.exact = nullptr;
  p.time_invariant = true;
  p.x_min = -1.0;
  p.x_max = 1.0;
  p.horizon = 0.5;
  return p;
}

HJBProblem zero_dynamics_problem() {
  HJBProblem p;
  p.name = "zero-dynamics";
  p.controls = {0.0};
  p.sigma = [](double, double, double) { return 0.0; };
  p.drift = [](double, double, double) { return 0.0; };
  p.discount = [](double, double, double) { return 0.0; };
  p.source = [](double, double, double) { return 0.0; };
  p.initial = [](double x) { return bump(x); };
  p.boundary = [](double, double) { return 0.0; };
  p.exact = [](double, double x) { return bump(x); };
  p.time_invariant = true;
  p.x_min = -2.0;
  p.x_max = 2.0;
  p.horizon = 0.2;
  return p;
}

AssumptionReport check_assumptions(const HJBProblem& problem, const Grid1D& grid,
                                   const TimeGrid& time) {
  AssumptionReport rep;
  rep.space_samples = grid.padded_size();
  rep.time_samples = time.steps + 1;
  rep.control_samples = static_cast<int>(problem.controls.size());

  double inf_sigma_sq = std::numeric_limits<double>::infinity();
  double max_dd_sigma_sq = 0.0;   // |d(sigma^2)/dx| estimate
  double max_dd_drift = 0.0;      // |db/dx| estimate
  double min_d2_sigma_sq = std::numeric_limits<double>::infinity();

  const int lo = -1;
  const int hi = grid.interior_count + 2;
  const double h = grid.h;
  for (int k = 0; k <= time.steps; ++k) {
    const double t = time.t(k);
    for (double a : problem.controls) {
      for (int i = lo; i <= hi; ++i) {
        const double x = grid.node(i);
        const double s = problem.sigma(t, x, a);
        const double b = problem.drift(t, x, a);
        const double r = problem.discount(t, x, a);
        rep.sup_sigma = std::max(rep.sup_sigma, std::abs(s));
        rep.sup_drift = std::max(rep.sup_drift, std::abs(b));
        rep.sup_discount = std::max(rep.sup_discount, std::abs(r));
        inf_sigma_sq = std::min(inf_sigma_sq, s * s);
        if (i < hi) {
          const double sn = problem.sigma(t, grid.node(i + 1), a);
          const double bn = problem.drift(t, grid.node(i + 1), a);
          max_dd_sigma_sq = std::max(max_dd_sigma_sq, std::abs(sn * sn - s * s) / h);
          max_dd_drift = std::max(max_dd_drift, std::abs(bn - b) / h);
        }
        if (i > lo && i < hi) {
          const double sm = problem.sigma(t, grid.node(i - 1), a);
          const double sp = problem.sigma(t, grid.node(i + 1), a);
          const double d2 = (sm * sm - 2.0 * s * s + sp * sp) / (h * h);
          min_d2_sigma_sq = std::min(min_d2_sigma_sq, d2);
        }
      }
    }
  }
  rep.ellipticity_eta = inf_sigma_sq;
  rep.sigma_sq_lipschitz = max_dd_sigma_sq;
  rep.drift_lipschitz = max_dd_drift;
  rep.semiconcavity_bound = std::max(0.0, -min_d2_sigma_sq);
  return rep;
}

}  // namespace hjb
