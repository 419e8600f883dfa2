#include "hjb/grid.hpp"

#include <stdexcept>

namespace hjb {

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(padded_size()));
  for (int i = -1; i <= interior_count + 2; ++i) out.push_back(node(i));
  return out;
}

Grid1D build_grid_1d(double x_min, double x_max, int interior_count) {
  if (!(x_min < x_max)) throw std::invalid_argument("grid: x_min must be < x_max");
  if (interior_count < 1) throw std::invalid_argument("grid: interior_count must be >= 1");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.interior_count = interior_count;
  g.h = (x_max - x_min) / static_cast<double>(interior_count + 1);
  return g;
}

TimeGrid build_time_grid(double horizon, int steps) {
  if (!(horizon > 0)) throw std::invalid_argument("time grid: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("time grid: steps must be >= 1");
  TimeGrid t;
  t.horizon = horizon;
  t.steps = steps;
  t.tau = horizon / static_cast<double>(steps);
  return t;
}

CflCheck check_cfl(double b_sup, double tau, double h, double bound) {
  if (!(tau > 0) || !(h > 0)) throw std::invalid_argument("check_cfl: tau and h must be > 0");
  CflCheck c;
  c.ratio = b_sup * tau / h;
  c.margin = bound - c.ratio;
  c.ok = c.ratio < bound;
  return c;
}

}  // namespace hjb
