#include <doctest.h>

#include <stdexcept>

#include "hjb/grid.hpp"

using namespace hjb;

TEST_SUITE_BEGIN("grid");

TEST_CASE("uniform mesh geometry") {
  const Grid1D g = build_grid_1d(-2.0, 2.0, 9);
  CHECK(g.h == doctest::Approx(0.4));
  CHECK(g.node(0) == doctest::Approx(-2.0));
  CHECK(g.node(10) == doctest::Approx(2.0));
  CHECK(g.node(-1) == doctest::Approx(-2.4));
  CHECK(g.node(11) == doctest::Approx(2.4));
  CHECK(g.padded_size() == 13);
  CHECK(Grid1D::pad(-1) == 0);
  CHECK(Grid1D::pad(9) == 10);
  CHECK(g.nodes().size() == 13);
}

TEST_CASE("refined grids nest bit-exactly") {
  const Grid1D coarse = build_grid_1d(-2.0, 2.0, 9);
  const Grid1D fine = build_grid_1d(-2.0, 2.0, 19);
  for (int i = -1; i <= 11; ++i) {
    CHECK(coarse.node(i) == fine.node(2 * i));  // exact, not approximate
  }
}

TEST_CASE("degenerate grids are rejected") {
  CHECK_THROWS_AS(build_grid_1d(1.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid_1d(2.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid_1d(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("time grid") {
  const TimeGrid t = build_time_grid(0.2, 5);
  CHECK(t.tau == doctest::Approx(0.04));
  CHECK(t.t(0) == 0.0);
  CHECK(t.t(5) == doctest::Approx(0.2));
  CHECK_THROWS_AS(build_time_grid(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_time_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("parabolic step-size check") {
  const CflCheck ok = check_cfl(1.0, 0.04, 0.4, kCflBoundBdf2);
  CHECK(ok.ok);
  CHECK(ok.ratio == doctest::Approx(0.1));
  CHECK(ok.margin == doctest::Approx(1.4));

  const CflCheck bad = check_cfl(2.0, 0.3, 0.1, kCflBoundEuler);
  CHECK_FALSE(bad.ok);
  CHECK(bad.ratio == doctest::Approx(6.0));
  CHECK(bad.margin == doctest::Approx(-5.0));

  // the bound is strict
  CHECK_FALSE(check_cfl(1.5, 0.1, 0.1, kCflBoundBdf2).ok);
  CHECK_THROWS_AS(check_cfl(1.0, -0.1, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(check_cfl(1.0, 0.1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("2d grid interior count") {
  Grid2D g{build_grid_1d(0.0, 1.0, 3), build_grid_1d(0.0, 2.0, 5)};
  CHECK(g.interior_count() == 15);
}

TEST_SUITE_END();
