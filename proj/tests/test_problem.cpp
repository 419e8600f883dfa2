#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hjb/problem.hpp"
#include "support/oracles.hpp"

using namespace hjb;

namespace {

double bump(double x) {
  const double w = std::max(0.0, 1.0 - x * x);
  return w * w * w * w;
}

// Hopf-Lax value for v_t + |v_x| = 0: minimum of the datum over the
// dependence window, by dense sampling.
double window_min(const InitialFn& v0, double t, double x, int samples = 4001) {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double y = x - t + 2.0 * t * static_cast<double>(j) / (samples - 1);
    m = std::min(m, v0(y));
  }
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("problem");

TEST_CASE("eikonal scenario") {
  const HJBProblem p = eikonal_problem();
  CHECK(p.controls == std::vector<double>{-1.0, 1.0});
  CHECK(p.x_min == -2.0);
  CHECK(p.x_max == 2.0);
  CHECK(p.horizon == doctest::Approx(0.2));
  CHECK(p.time_invariant);
  CHECK(p.exact(0.0, 0.3) == doctest::Approx(p.initial(0.3)));
  CHECK(p.sigma(0.0, 0.1, 1.0) == 0.0);
  CHECK(p.drift(0.0, 0.1, -1.0) == -1.0);
  CHECK(p.boundary(0.1, 2.2) == 0.0);
}

TEST_CASE("eikonal closed form equals the Hopf-Lax window minimum") {
  const HJBProblem p = eikonal_problem();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-2.0, 2.0), ts(0.01, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = ts(rng);
    const double x = xs(rng);
    const double ref = window_min([](double y) { return bump(y); }, t, x);
    CHECK(p.exact(t, x) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("negated-datum closed form equals the Hopf-Lax window minimum") {
  const HJBProblem p = eikonal_problem_negative();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xs(-2.0, 2.0), ts(0.01, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = ts(rng);
    const double x = xs(rng);
    const double ref = window_min([](double y) { return -bump(y); }, t, x);
    CHECK(p.exact(t, x) == doctest::Approx(ref).epsilon(1e-6));
  }
  // the valley floor is flat at -1 once the window straddles the origin
  CHECK(p.exact(0.2, 0.05) == doctest::Approx(-1.0));
  CHECK(p.exact(0.2, -0.1) == doctest::Approx(-1.0));
}

TEST_CASE("negated-datum closed form matches a monotone first-order run") {
  const HJBProblem p = eikonal_problem_negative();
  const int i_plus_1 = 1280;
  const int steps = 256;  // tau = h/2 on the length-4 domain
  const auto u = hjb::testing::monotone_eikonal(p.initial, p.x_min, p.x_max, i_plus_1,
                                                p.horizon, steps);
  const double h = (p.x_max - p.x_min) / i_plus_1;
  double worst = 0.0;
  for (int i = 1; i <= i_plus_1 - 1; ++i) {
    const double x = p.x_min + i * h;
    worst = std::max(worst, std::abs(u[static_cast<size_t>(i - 1)] - p.exact(p.horizon, x)));
  }
  CHECK(worst < 2e-2);
}

TEST_CASE("controlled diffusion scenario") {
  const HJBProblem p = controlled_diffusion_problem();
  CHECK(p.controls == std::vector<double>{0.1, 0.5});
  CHECK(p.sigma(0.0, 0.3, 0.5) == 0.5);
  CHECK(p.drift(0.0, 0.3, 0.5) == 0.0);
  CHECK_FALSE(static_cast<bool>(p.exact));
  CHECK(p.initial(0.5) == doctest::Approx(1.0));
  CHECK(p.horizon == doctest::Approx(0.5));
}

TEST_CASE("assumption report samples the coefficient bounds") {
  const HJBProblem p = eikonal_problem();
  const Grid1D g = build_grid_1d(p.x_min, p.x_max, 19);
  const TimeGrid t = build_time_grid(p.horizon, 5);
  const AssumptionReport rep = check_assumptions(p, g, t);
  CHECK(rep.sup_drift == doctest::Approx(1.0));
  CHECK(rep.sup_sigma == 0.0);
  CHECK(rep.sup_discount == 0.0);
  CHECK(rep.ellipticity_eta == 0.0);
  CHECK(rep.drift_lipschitz == 0.0);
  CHECK(rep.control_samples == 2);

  const HJBProblem q = controlled_diffusion_problem();
  const AssumptionReport rep2 =
      check_assumptions(q, build_grid_1d(q.x_min, q.x_max, 19), build_time_grid(q.horizon, 5));
  CHECK(rep2.sup_sigma == doctest::Approx(0.5));
  CHECK(rep2.ellipticity_eta == doctest::Approx(0.01));
  CHECK(rep2.sigma_sq_lipschitz == 0.0);
  CHECK(rep2.semiconcavity_bound == 0.0);
}

TEST_SUITE_END();
