#include "hjb/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "hjb/fd_ops.hpp"
#include "hjb/stepper.hpp"

namespace hjb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config line " + std::to_string(line) + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
  }
}

std::vector<NormKind> parse_norms(const std::string& v, int line) {
  std::vector<NormKind> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok == "h1") out.push_back(NormKind::h1_rescaled);
    else if (tok == "l2") out.push_back(NormKind::l2_rescaled);
    else if (tok == "inf" || tok == "sup") out.push_back(NormKind::sup);
    else throw ConfigError("config line " + std::to_string(line) + ": unknown norm '" + tok + "'");
  }
  if (out.empty()) {
    throw ConfigError("config line " + std::to_string(line) + ": empty norm list");
  }
  return out;
}

const char* norm_tag(NormKind kind) {
  switch (kind) {
    case NormKind::h1_rescaled: return "h1";
    case NormKind::l2_rescaled: return "l2";
    case NormKind::sup: return "inf";
    case NormKind::a_norm: return "a";
    case NormKind::euclidean: return "l2raw";
  }
  return "?";
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line) + ": empty key or value");
    }

    if (key == "scenario") cfg.scenario = value;
    else if (key == "scheme") cfg.scheme = value;
    else if (key == "ladder.n0") cfg.ladder.n0 = parse_int(value, line);
    else if (key == "ladder.i0") cfg.ladder.i0_plus_1 = parse_int(value, line);
    else if (key == "ladder.levels") cfg.ladder.levels = parse_int(value, line);
    else if (key == "cfl") cfg.cfl = parse_double(value, line);
    else if (key == "norms") cfg.norms = parse_norms(value, line);
    else if (key == "reference.kind") cfg.reference_kind = value;
    else if (key == "reference.n") cfg.reference_n = parse_int(value, line);
    else if (key == "reference.i") cfg.reference_i = parse_int(value, line);
    else if (key == "solver.tol") cfg.solver.tol = parse_double(value, line);
    else if (key == "solver.max_iter") cfg.solver.max_iter = parse_int(value, line);
    else if (key == "dump.profiles") cfg.dump_profiles = parse_bool(value, line);
    else if (key == "dump.matrices") cfg.dump_matrices = parse_bool(value, line);
    else throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  if (cfg.reference_kind != "exact" && cfg.reference_kind != "euler") {
    throw ConfigError("config: reference.kind must be 'exact' or 'euler'");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

HJBProblem make_problem(const std::string& scenario) {
  if (scenario == "eikonal") return eikonal_problem();
  if (scenario == "eikonal-neg") return eikonal_problem_negative();
  if (scenario == "controlled-diffusion") return controlled_diffusion_problem();
  if (scenario == "zero-dynamics") return zero_dynamics_problem();
  throw ConfigError("config: unknown scenario '" + scenario + "'");
}

std::string format_table_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "N,I_plus_1";
  for (NormKind k : table.norms) os << ",err_" << norm_tag(k) << ",ord_" << norm_tag(k);
  os << ",cpu_s\n";
  char buf[64];
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const TableRow& row = table.rows[r];
    os << row.n_steps << ',' << row.i_plus_1;
    for (size_t j = 0; j < table.norms.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.2e", row.errors[j]);
      os << ',' << buf << ',';
      if (r == 0) {
        // first row has no predecessor
      } else if (std::isnan(row.orders[j])) {
        os << "--";
      } else {
        std::snprintf(buf, sizeof(buf), "%.2f", row.orders[j]);
        os << buf;
      }
    }
    std::snprintf(buf, sizeof(buf), "%.3f", row.cpu_seconds);
    os << ',' << buf << '\n';
  }
  return os.str();
}

namespace {

struct SchemeChoice {
  SchemeTag tag = SchemeTag::bdf2;
  DriftMode drift = DriftMode::bdf_upwind;
};

SchemeChoice parse_scheme(const std::string& scheme) {
  if (scheme == "bdf2") return {SchemeTag::bdf2, DriftMode::bdf_upwind};
  if (scheme == "euler") return {SchemeTag::implicit_euler, DriftMode::bdf_upwind};
  if (scheme == "cn") return {SchemeTag::crank_nicolson, DriftMode::centered};
  if (scheme == "bdf2-centered-drift") return {SchemeTag::bdf2, DriftMode::centered};
  throw ConfigError("config: unknown scheme '" + scheme + "'");
}

Trajectory run_scheme(SchemeTag tag, const HJBProblem& problem, const Grid1D& grid,
                      const TimeGrid& time, const StepperOptions& opts) {
  switch (tag) {
    case SchemeTag::bdf2: return run_bdf2(problem, grid, time, opts);
    case SchemeTag::implicit_euler: return run_implicit_euler(problem, grid, time, opts);
    case SchemeTag::crank_nicolson: return run_crank_nicolson(problem, grid, time, opts);
  }
  throw std::invalid_argument("run_scheme: unknown scheme");
}

struct LevelExtra {
  double worst_certificate = 0.0;
  double worst_cfl = 0.0;
  long sweeps = 0;
  std::vector<double> final_level;
};

}  // namespace

RunOutcome run_scenario(const RunConfig& config, const std::string& out_dir, int threads) {
  const SchemeChoice choice = parse_scheme(config.scheme);
  HJBProblem problem = make_problem(config.scenario);
  problem.drift_mode = choice.drift;

  Ladder ladder = config.ladder;
  const double length = problem.x_max - problem.x_min;
  if (config.cfl > 0.0) {
    // Fixed tau/h: the mesh follows the step count.
    const double i0 = length * config.cfl * static_cast<double>(ladder.n0) / problem.horizon;
    ladder.i0_plus_1 = static_cast<int>(std::lround(i0));
    if (std::abs(i0 - ladder.i0_plus_1) > 1e-9 || ladder.i0_plus_1 < 2) {
      throw ConfigError("config: cfl ratio does not give an integer mesh count at level 0");
    }
  }

  // Optional shared reference run.
  Trajectory reference;
  const bool use_reference = config.reference_kind == "euler";
  if (use_reference) {
    if (config.reference_n < 1 || config.reference_i < 2) {
      throw ConfigError("config: reference.n and reference.i are required for reference.kind = euler");
    }
    HJBProblem ref_problem = make_problem(config.scenario);  // upwind drift
    const Grid1D ref_grid =
        build_grid_1d(ref_problem.x_min, ref_problem.x_max, config.reference_i - 1);
    const TimeGrid ref_time = build_time_grid(ref_problem.horizon, config.reference_n);
    StepperOptions ref_opts;
    ref_opts.solver = config.solver;
    ref_opts.store_levels = false;
    reference = run_implicit_euler(ref_problem, ref_grid, ref_time, ref_opts);
  } else if (!problem.exact) {
    throw ConfigError("config: scenario '" + config.scenario +
                      "' has no closed-form solution; set reference.kind = euler");
  }

  std::vector<LevelResult> results(static_cast<size_t>(ladder.levels));
  std::vector<LevelExtra> extras(static_cast<size_t>(ladder.levels));

  auto run_level = [&](int l) {
    const int n_steps = ladder.n0 << l;
    const int i_plus_1 = ladder.i0_plus_1 << l;
    const Grid1D grid = build_grid_1d(problem.x_min, problem.x_max, i_plus_1 - 1);
    const TimeGrid time = build_time_grid(problem.horizon, n_steps);
    StepperOptions opts;
    opts.solver = config.solver;

    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = run_scheme(choice.tag, problem, grid, time, opts);
    const auto stop = std::chrono::steady_clock::now();

    LevelResult res;
    res.cpu_seconds = std::chrono::duration<double>(stop - start).count();
    for (NormKind kind : config.norms) {
      if (use_reference) {
        res.errors.push_back(error_vs_reference(traj, reference, kind));
      } else {
        res.errors.push_back(error_vs_exact(traj, problem.exact, kind).value);
      }
    }
    LevelExtra extra;
    for (const StepRecord& rec : traj.steps) {
      extra.worst_certificate = std::max(extra.worst_certificate, rec.certificate_ratio);
      extra.worst_cfl = std::max(extra.worst_cfl, rec.cfl_ratio);
      extra.sweeps += rec.solve.iterations;
    }
    extra.final_level = traj.levels.back();
    results[static_cast<size_t>(l)] = std::move(res);
    extras[static_cast<size_t>(l)] = std::move(extra);
  };

  if (threads > 1) {
    std::vector<std::future<void>> pending;
    for (int l = 0; l < ladder.levels; ++l) {
      pending.push_back(std::async(std::launch::async, run_level, l));
      if (static_cast<int>(pending.size()) == threads) {
        for (auto& f : pending) f.get();
        pending.clear();
      }
    }
    for (auto& f : pending) f.get();
  } else {
    for (int l = 0; l < ladder.levels; ++l) run_level(l);
  }

  auto cached = [&](int n_steps, int /*i_plus_1*/) {
    const int l = static_cast<int>(std::lround(std::log2(static_cast<double>(n_steps) /
                                                         static_cast<double>(ladder.n0))));
    return results[static_cast<size_t>(l)];
  };

  RunOutcome out;
  out.table = convergence_table(cached, ladder, config.norms);
  {
    const Grid1D g0 = build_grid_1d(problem.x_min, problem.x_max, ladder.i0_plus_1 - 1);
    const TimeGrid t0 = build_time_grid(problem.horizon, ladder.n0);
    out.assumptions = check_assumptions(problem, g0, t0);
  }
  for (const LevelExtra& e : extras) {
    out.worst_certificate_ratio = std::max(out.worst_certificate_ratio, e.worst_certificate);
    out.worst_cfl_ratio = std::max(out.worst_cfl_ratio, e.worst_cfl);
    out.total_sweeps += e.sweeps;
  }
  out.oscillation = oscillation_metric(extras.back().final_level);
  out.ok = true;
  for (const TableRow& row : out.table.rows) {
    for (double e : row.errors) {
      if (!std::isfinite(e)) out.ok = false;
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  out.csv_path = (fs::path(out_dir) / "table.csv").string();
  out.json_path = (fs::path(out_dir) / "report.json").string();
  {
    std::ofstream csv(out.csv_path);
    csv << format_table_csv(out.table);
  }
  {
    nlohmann::json j;
    j["scenario"] = config.scenario;
    j["scheme"] = config.scheme;
    j["ladder"] = {{"n0", ladder.n0}, {"i0", ladder.i0_plus_1}, {"levels", ladder.levels}};
    j["reference"] = config.reference_kind;
    j["worst_certificate_ratio"] = out.worst_certificate_ratio;
    j["worst_cfl_ratio"] = out.worst_cfl_ratio;
    j["total_sweeps"] = out.total_sweeps;
    j["oscillation"] = out.oscillation;
    j["ok"] = out.ok;
    j["assumptions"] = {
        {"sup_sigma", out.assumptions.sup_sigma},
        {"sup_drift", out.assumptions.sup_drift},
        {"sup_discount", out.assumptions.sup_discount},
        {"ellipticity_eta", out.assumptions.ellipticity_eta},
        {"sigma_sq_lipschitz", out.assumptions.sigma_sq_lipschitz},
        {"drift_lipschitz", out.assumptions.drift_lipschitz},
        {"semiconcavity_bound", out.assumptions.semiconcavity_bound},
    };
    nlohmann::json rows = nlohmann::json::array();
    for (const TableRow& row : out.table.rows) {
      nlohmann::json r;
      r["n"] = row.n_steps;
      r["i_plus_1"] = row.i_plus_1;
      r["errors"] = row.errors;
      nlohmann::json ords = nlohmann::json::array();
      for (double o : row.orders) {
        if (std::isnan(o)) ords.push_back(nullptr);
        else ords.push_back(o);
      }
      r["orders"] = ords;
      r["cpu_s"] = row.cpu_seconds;
      rows.push_back(std::move(r));
    }
    j["rows"] = rows;
    std::ofstream js(out.json_path);
    js << j.dump(2) << '\n';
  }

  if (config.dump_profiles) {
    for (int l = 0; l < ladder.levels; ++l) {
      const int i_plus_1 = ladder.i0_plus_1 << l;
      const Grid1D grid = build_grid_1d(problem.x_min, problem.x_max, i_plus_1 - 1);
      std::ofstream pf(fs::path(out_dir) / ("profile_" + std::to_string(l) + ".csv"));
      pf << (problem.exact ? "x,u,exact\n" : "x,u\n");
      const auto& u = extras[static_cast<size_t>(l)].final_level;
      for (int i = 1; i <= grid.interior_count; ++i) {
        pf << grid.node(i) << ',' << u[static_cast<size_t>(i - 1)];
        if (problem.exact) pf << ',' << problem.exact(problem.horizon, grid.node(i));
        pf << '\n';
      }
    }
  }

  if (config.dump_matrices) {
    const Grid1D grid = build_grid_1d(problem.x_min, problem.x_max, ladder.i0_plus_1 - 1);
    const TimeGrid time = build_time_grid(problem.horizon, ladder.n0);
    const int k = std::min(2, time.steps);
    const StepMode mode =
        (choice.tag == SchemeTag::bdf2 && k >= 2) ? StepMode::bdf2 : StepMode::euler;
    const AssembledOperator op = assemble_operator(problem, grid, time.t(k), time.tau, mode);
    for (size_t c = 0; c < op.matrices.size(); ++c) {
      std::ofstream mf(fs::path(out_dir) / ("matrix_" + std::to_string(c) + ".txt"));
      dump_banded(mf, op.matrices[c]);
    }
  }

  return out;
}

}  // namespace hjb
