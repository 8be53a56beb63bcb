#include "msns/app.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "msns/error.hpp"
#include "msns/spectral.hpp"

namespace msns {
namespace fs = std::filesystem;

namespace {

MarchOptions checkpointing(const RunConfig& config, RunSummary& summary,
                           std::size_t first_window) {
  MarchOptions options;
  options.first_window = first_window;
  const fs::path dir = config.output.directory;
  const int every = config.output.checkpoint_every;
  const std::uint64_t hash = config.hash();
  options.on_window = [&summary, dir, every, hash, config](std::size_t k, double t,
                                                           const RealVectorField& u) {
    if (every <= 0 || (k + 1) % static_cast<std::size_t>(every) != 0) return;
    const fs::path path = dir / checkpoint_name(k + 1);
    write_checkpoint(u, t, config.physics.nu, config.mollifier.epsilon, hash, path);
    summary.checkpoints.push_back(path);
  };
  return options;
}

}  // namespace

RunSummary run_simulation(const RunConfig& config) {
  const Grid grid = make_grid(config.n, config.length);
  const RealVectorField u0 = make_flow(grid, config.flow);
  fs::create_directories(config.output.directory);

  RunSummary summary;
  const Trajectory trajectory = march(u0, config.horizon, config.window, config.physics,
                                      config.mollifier, checkpointing(config, summary, 0));
  summary.windows = trajectory.records.size();
  summary.final_time = trajectory.records.back().t;
  summary.diagnostics_path = fs::path(config.output.directory) / config.output.diagnostics_file;
  write_diagnostics(trajectory.records, summary.diagnostics_path);
  summary.apriori = apriori_monitor(trajectory);
  return summary;
}

RunSummary resume_simulation(const fs::path& checkpoint, const RunConfig& config) {
  Checkpoint state = read_checkpoint(checkpoint);
  if (state.config_hash != config.hash()) {
    throw Error(ErrorKind::Config,
                "checkpoint " + checkpoint.string() + " was written by a different configuration");
  }
  const double windows_done = state.t / config.window.delta_t;
  const auto first_window = static_cast<std::size_t>(std::llround(windows_done));
  if (std::abs(windows_done - static_cast<double>(first_window)) > 1e-6) {
    throw Error(ErrorKind::Config, "checkpoint time is not on a window boundary");
  }
  if (first_window >= window_count(config.horizon, config.window.delta_t)) {
    throw Error(ErrorKind::Config, "checkpoint already reaches the configured horizon");
  }
  fs::create_directories(config.output.directory);

  RunSummary summary;
  summary.diagnostics_path = fs::path(config.output.directory) / config.output.diagnostics_file;
  std::vector<DiagnosticsRecord> records;
  if (fs::exists(summary.diagnostics_path)) {
    for (const auto& r : read_diagnostics(summary.diagnostics_path)) {
      if (r.t < state.t + 0.5 * config.window.delta_t) records.push_back(r);
    }
  }
  const Trajectory trajectory =
      march(state.u, config.horizon, config.window, config.physics, config.mollifier,
            checkpointing(config, summary, first_window));
  records.insert(records.end(), trajectory.records.begin(), trajectory.records.end());
  write_diagnostics(records, summary.diagnostics_path);
  summary.windows = trajectory.records.size();
  summary.final_time = trajectory.records.back().t;
  summary.apriori = apriori_monitor(trajectory);
  return summary;
}

std::string ValidationReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-12s %8s %8s %14s %14s %s\n", "flow", "integrator",
                "nu", "T", "sup_error", "max_div", "status");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-12s %8.3g %8.3g %14.6e %14.6e %s\n",
                  r.flow.c_str(), r.integrator.c_str(), r.nu, r.horizon, r.sup_error,
                  r.max_divergence, r.passed ? "ok" : "FAIL");
    out << line;
  }
  std::snprintf(line, sizeof line, "tolerance %.3g, divergence limit 1e-08: %s\n", tolerance,
                passed ? "PASS" : "FAIL");
  out << line;
  return out.str();
}

ValidationReport validate_suite(const RunConfig& config, double tolerance, double oracle_dt) {
  constexpr double kDivergenceLimit = 1e-8;
  const Grid grid = make_grid(config.n, config.length);
  ValidationReport report;
  report.tolerance = tolerance;

  auto max_div = [](const Trajectory& tr) {
    double worst = tr.initial.max_divergence;
    for (const auto& r : tr.records) worst = std::max(worst, r.max_divergence);
    return worst;
  };
  auto add = [&](std::string flow, std::string integrator, double nu, double horizon,
                 double error, double divergence) {
    ValidationRow row{std::move(flow), std::move(integrator), nu, horizon, error, divergence,
                      error <= tolerance && divergence <= kDivergenceLimit};
    report.rows.push_back(row);
  };

  struct Case {
    const char* name;
    FlowKind kind;
    RealVectorField u0;
  };
  const std::vector<Case> cases = {
      {"taylor_green", FlowKind::TaylorGreen, taylor_green(grid, 1.0)},
      {"abc", FlowKind::Abc, abc_flow(grid, 1.0, 1.0, 1.0)},
  };
  const double nu = config.physics.nu;
  for (const auto& c : cases) {
    const Trajectory mollified =
        march(c.u0, config.horizon, config.window, config.physics, config.mollifier);
    const double t_end = mollified.records.back().t;
    const RealVectorField exact = exact_decay_solution(c.kind, c.u0, t_end, nu);
    add(c.name, "march", nu, t_end, sup_norm(mollified.final_state - exact), max_div(mollified));

    const Trajectory oracle = oracle_integrate(c.u0, t_end, oracle_dt, config.physics,
                                               config.window.dealias);
    const RealVectorField exact_oracle =
        exact_decay_solution(c.kind, c.u0, oracle.records.back().t, nu);
    add(c.name, "oracle", nu, oracle.records.back().t,
        sup_norm(oracle.final_state - exact_oracle), max_div(oracle));
    add(c.name, "march-oracle", nu, t_end, sup_norm(mollified.final_state - oracle.final_state),
        std::max(max_div(mollified), max_div(oracle)));
  }

  PhysicalParams inviscid;
  const RealVectorField abc = abc_flow(grid, 1.0, 1.0, 1.0);
  const Trajectory euler = march(abc, config.horizon, config.window, inviscid, config.mollifier);
  add("abc_inviscid", "march", 0.0, euler.records.back().t,
      sup_norm(euler.final_state - abc), max_div(euler));

  report.passed = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const ValidationRow& r) { return r.passed; });
  return report;
}

std::string probe_operators_report(const RunConfig& config, std::uint64_t seed, int count) {
  const Grid grid = make_grid(config.n, config.length);
  const double dt = config.window.delta_t;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  auto push = [&](OperatorId op, double t, ProbeBand band) {
    const MultiplierReport r =
        probe_operator_norm(op, seed, count, grid, config.physics, config.mollifier, t, band);
    reports.push_back(nlohmann::ordered_json::parse(to_json(r)));
  };
  push(OperatorId::B, 0.0, {});
  push(OperatorId::B, dt, {});
  push(OperatorId::E, 0.0, {});
  push(OperatorId::E, 0.0, ProbeBand{.shell = 1, .include_mean = true});
  push(OperatorId::S, dt, {});

  nlohmann::ordered_json out;
  out["reports"] = reports;
  out["initial_split_gap"] =
      initial_split_gap(make_flow(grid, config.flow), config.mollifier);
  return out.dump(2);
}

QFit fit_q_for_config(const RunConfig& config, double t) {
  const Grid grid = make_grid(config.n, config.length);
  return fit_q_ansatz(make_flow(grid, config.flow), t, config.physics, config.mollifier,
                      config.window.dealias);
}

}  // namespace msns
