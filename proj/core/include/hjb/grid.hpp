#pragma once

#include <vector>

namespace hjb {

/// Uniform spatial mesh on (x_min, x_max) with `interior_count` unknowns and
/// two ghost layers on each side.  Node i sits at x_min + i*h for
/// i in [-1, interior_count+2]; indices {-1, 0, I+1, I+2} carry prescribed
/// boundary values, {1..I} are unknowns.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int interior_count = 1;
  double h = 0.5;

  /// Node position, computed multiplicatively so that refined grids nest
  /// bit-exactly (coarse node(i) == fine node(2i)).
  double node(int i) const { return x_min + static_cast<double>(i) * h; }

  /// Number of entries in a padded vector covering indices -1 .. I+2.
  int padded_size() const { return interior_count + 4; }

  /// Position of grid index i (in [-1, I+2]) inside a padded vector.
  static int pad(int i) { return i + 1; }

  std::vector<double> nodes() const;
};

Grid1D build_grid_1d(double x_min, double x_max, int interior_count);

struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;
  double tau = 1.0;

  double t(int k) const { return static_cast<double>(k) * tau; }
};

TimeGrid build_time_grid(double horizon, int steps);

struct Grid2D {
  Grid1D x;
  Grid1D y;

  int interior_count() const { return x.interior_count * y.interior_count; }
};

inline constexpr double kCflBoundBdf2 = 1.5;
inline constexpr double kCflBoundEuler = 1.0;

struct CflCheck {
  bool ok = false;
  double ratio = 0.0;
  double margin = 0.0;
};

/// ok iff b_sup * tau / h < bound.  Bound is 3/2 for BDF2 steps and 1 for the
/// backward-Euler startup step.
CflCheck check_cfl(double b_sup, double tau, double h, double bound);

}  // namespace hjb
