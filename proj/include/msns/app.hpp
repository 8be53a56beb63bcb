#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msns/io.hpp"

namespace msns {

struct RunSummary {
  std::size_t windows = 0;
  double final_time = 0.0;
  std::filesystem::path diagnostics_path;
  std::vector<std::filesystem::path> checkpoints;
  AprioriReport apriori;
};

/// Marches the configured flow, writing diagnostics and checkpoints under
/// config.output.directory.
RunSummary run_simulation(const RunConfig& config);

/// Continues a run from a checkpoint written by run_simulation. The
/// diagnostics file keeps existing rows up to the checkpoint time and gains
/// the new windows. Throws Error(Config) when the checkpoint was produced by
/// a different configuration.
RunSummary resume_simulation(const std::filesystem::path& checkpoint, const RunConfig& config);

struct ValidationRow {
  std::string flow;
  std::string integrator;
  double nu = 0.0;
  double horizon = 0.0;
  double sup_error = 0.0;
  double max_divergence = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double tolerance = 0.0;
  bool passed = false;

  std::string table() const;
};

/// Exact-flow suite on the configured grid, window and mollifier: Taylor-Green
/// and ABC marches against their closed-form decay, the reference integrator
/// on the same flows, and the inviscid ABC steady state. Every emitted state
/// must also keep max|div u| <= 1e-8.
ValidationReport validate_suite(const RunConfig& config, double tolerance = 1e-3,
                                double oracle_dt = 1e-3);

/// JSON array of multiplier reports for B, E and S on the configured grid.
std::string probe_operators_report(const RunConfig& config, std::uint64_t seed = 1,
                                   int count = 20);

QFit fit_q_for_config(const RunConfig& config, double t);

}  // namespace msns
