#pragma once

#include <string>
#include <vector>

#include "hjb/analysis.hpp"
#include "hjb/sup_solver.hpp"

namespace hjb {

/// Settings for one convergence study, read from a flat `key = value` file.
/// Keys: scenario, scheme, ladder.n0, ladder.i0, ladder.levels, cfl, norms,
/// reference.kind, reference.n, reference.i, solver.tol, solver.max_iter,
/// dump.profiles, dump.matrices.
struct RunConfig {
  std::string scenario = "eikonal";
  /// bdf2 | euler | cn | bdf2-centered-drift
  std::string scheme = "bdf2";
  Ladder ladder;
  /// Fixed tau/h ratio; when > 0 the mesh is derived from the step count and
  /// ladder.i0 is ignored.
  double cfl = 0.0;
  std::vector<NormKind> norms = {NormKind::h1_rescaled, NormKind::l2_rescaled, NormKind::sup};
  /// "exact" measures against the closed-form solution; "euler" against a
  /// fine backward-Euler reference run with reference.n steps and
  /// reference.i mesh intervals.
  std::string reference_kind = "exact";
  int reference_n = 0;
  int reference_i = 0;
  SolveOptions solver;
  bool dump_profiles = false;
  bool dump_matrices = false;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

struct RunOutcome {
  ConvergenceTable table;
  AssumptionReport assumptions;
  double worst_certificate_ratio = 0.0;
  double worst_cfl_ratio = 0.0;
  long total_sweeps = 0;
  /// Largest second difference of the finest final profile.
  double oscillation = 0.0;
  bool ok = false;
  std::string csv_path;
  std::string json_path;
};

/// Runs the ladder, writes <out_dir>/table.csv and <out_dir>/report.json
/// (plus optional per-level profiles and matrix dumps) and returns the
/// collected results.  `threads` > 1 runs ladder levels concurrently.
RunOutcome run_scenario(const RunConfig& config, const std::string& out_dir, int threads = 1);

/// Scenario factory behind the `scenario` config key.
HJBProblem make_problem(const std::string& scenario);

std::string format_table_csv(const ConvergenceTable& table);

}  // namespace hjb
