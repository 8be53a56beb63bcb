// Command-line front end. Talks to the solver only through the C API.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "msns/msns.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kFailure = 2, kIo = 3 };

int report(msns_status status) {
  switch (status) {
    case MSNS_OK: return kOk;
    case MSNS_ERR_CONFIG:
    case MSNS_ERR_INVALID_ARGUMENT:
      std::cerr << "ERROR[config] " << msns_last_error() << "\n";
      return kFailure;
    case MSNS_ERR_CONVERGENCE:
    case MSNS_ERR_NUMERIC:
      std::cerr << "ERROR[converge] " << msns_last_error() << "\n";
      return kFailure;
    case MSNS_ERR_IO:
      std::cerr << "ERROR[io] " << msns_last_error() << "\n";
      return kIo;
    case MSNS_ERR_INTERNAL: break;
  }
  std::cerr << "ERROR[io] internal: " << msns_last_error() << "\n";
  return kIo;
}

struct ConfigHandle {
  msns_config* ptr = nullptr;
  ~ConfigHandle() { msns_config_free(ptr); }
};

int load(const std::string& path, const std::string& output_dir, ConfigHandle& config) {
  if (int rc = report(msns_config_load(path.c_str(), &config.ptr)); rc != kOk) return rc;
  if (!output_dir.empty()) {
    return report(msns_config_set_output_dir(config.ptr, output_dir.c_str()));
  }
  return kOk;
}

void print_summary(const msns_run_summary& s) {
  std::printf("windows %zu, final t %.17g, checkpoints %zu\n", s.windows, s.final_time,
              s.checkpoints);
  std::printf("a priori monitor: %zu sup-norm and %zu L2 increases\n", s.sup_violations,
              s.l2_violations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mollified pseudo-spectral Navier-Stokes solver", "msns"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string output_dir;
  double tolerance = 1e-3;
  double fit_time = 0.0;
  std::uint64_t seed = 1;
  int count = 20;

  auto* run = app.add_subcommand("run", "march the configured flow");
  run->add_option("config", config_path, "run configuration (JSON)")->required();
  run->add_option("--output-dir", output_dir, "override output.directory");

  auto* validate = app.add_subcommand("validate", "exact-flow convergence suite");
  validate->add_option("config", config_path, "run configuration (JSON)")->required();
  validate->add_option("--tol", tolerance, "sup-norm error tolerance");

  auto* probe = app.add_subcommand("probe-operators", "multiplier reports for B, E, S");
  probe->add_option("config", config_path, "run configuration (JSON)")->required();
  probe->add_option("--seed", seed, "first probe seed");
  probe->add_option("--count", count, "probe fields per report")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit-q", "fit the q ansatz at time t");
  fit->add_option("config", config_path, "run configuration (JSON)")->required();
  fit->add_option("--t", fit_time, "time within the first window")->required();

  auto* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
  resume->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
  resume->add_option("--config", config_path, "run configuration (JSON)")->required();
  resume->add_option("--output-dir", output_dir, "override output.directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  ConfigHandle config;
  if (*run) {
    if (int rc = load(config_path, output_dir, config); rc != kOk) return rc;
    msns_run_summary summary{};
    if (int rc = report(msns_run(config.ptr, &summary)); rc != kOk) return rc;
    print_summary(summary);
    return kOk;
  }
  if (*resume) {
    if (int rc = load(config_path, output_dir, config); rc != kOk) return rc;
    msns_run_summary summary{};
    if (int rc = report(msns_resume(checkpoint_path.c_str(), config.ptr, &summary)); rc != kOk) {
      return rc;
    }
    print_summary(summary);
    return kOk;
  }
  if (*validate) {
    if (int rc = load(config_path, output_dir, config); rc != kOk) return rc;
    char* table = nullptr;
    int passed = 0;
    if (int rc = report(msns_validate(config.ptr, tolerance, &table, &passed)); rc != kOk) {
      return rc;
    }
    std::fputs(table, stdout);
    msns_string_free(table);
    if (!passed) {
      std::cerr << "ERROR[converge] validation errors exceed tolerance " << tolerance << "\n";
      return kFailure;
    }
    return kOk;
  }
  if (*probe) {
    if (int rc = load(config_path, output_dir, config); rc != kOk) return rc;
    char* json = nullptr;
    if (int rc = report(msns_probe_operators(config.ptr, seed, count, &json)); rc != kOk) {
      return rc;
    }
    std::puts(json);
    msns_string_free(json);
    return kOk;
  }
  if (*fit) {
    if (int rc = load(config_path, output_dir, config); rc != kOk) return rc;
    double q = 0.0, residual = 0.0;
    int degenerate = 0;
    if (int rc = report(msns_fit_q(config.ptr, fit_time, &q, &residual, &degenerate));
        rc != kOk) {
      return rc;
    }
    std::printf("t %.17g q %.17g residual %.17g%s\n", fit_time, q, residual,
                degenerate ? " (degenerate)" : "");
    return kOk;
  }
  return kUsage;
}
