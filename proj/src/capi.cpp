#include "msns/msns.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "msns/app.hpp"
#include "msns/error.hpp"
#include "msns/nonlinear.hpp"
#include "msns/spectral.hpp"

struct msns_config {
  msns::RunConfig value;
};

struct msns_field {
  msns::RealVectorField value;
};

namespace {

thread_local std::string last_error;

msns_status status_of(msns::ErrorKind kind) {
  using msns::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return MSNS_ERR_INVALID_ARGUMENT;
    case ErrorKind::Config: return MSNS_ERR_CONFIG;
    case ErrorKind::NonConvergence: return MSNS_ERR_CONVERGENCE;
    case ErrorKind::Io:
    case ErrorKind::MalformedCsv:
    case ErrorKind::BadMagic:
    case ErrorKind::BadVersion:
    case ErrorKind::BadCrc: return MSNS_ERR_IO;
    case ErrorKind::NonHermitianInput:
    case ErrorKind::ZeroWavenumber:
    case ErrorKind::NotDivergenceFree:
    case ErrorKind::NoBracket:
    case ErrorKind::CflViolation: return MSNS_ERR_NUMERIC;
  }
  return MSNS_ERR_INTERNAL;
}

template <typename Fn>
msns_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return MSNS_OK;
  } catch (const msns::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return MSNS_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MSNS_ERR_INTERNAL;
  }
}

msns_status null_argument(const char* name) {
  last_error = std::string("null argument: ") + name;
  return MSNS_ERR_INVALID_ARGUMENT;
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void fill(msns_run_summary* out, const msns::RunSummary& s) {
  if (!out) return;
  out->windows = s.windows;
  out->final_time = s.final_time;
  out->checkpoints = s.checkpoints.size();
  out->sup_violations = s.apriori.sup_violations.size();
  out->l2_violations = s.apriori.l2_violations.size();
}

}  // namespace

extern "C" {

const char* msns_last_error(void) { return last_error.c_str(); }

const char* msns_status_name(msns_status status) {
  switch (status) {
    case MSNS_OK: return "ok";
    case MSNS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MSNS_ERR_CONFIG: return "config";
    case MSNS_ERR_CONVERGENCE: return "convergence";
    case MSNS_ERR_IO: return "io";
    case MSNS_ERR_NUMERIC: return "numeric";
    case MSNS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

msns_status msns_config_load(const char* path, msns_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new msns_config{msns::load_config(path)}; });
}

msns_status msns_config_parse(const char* json_text, msns_config** out) {
  if (!json_text) return null_argument("json_text");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new msns_config{msns::parse_config(json_text)}; });
}

void msns_config_free(msns_config* config) { delete config; }

msns_status msns_config_set_output_dir(msns_config* config, const char* directory) {
  if (!config) return null_argument("config");
  if (!directory) return null_argument("directory");
  return guarded([&] { config->value.output.directory = directory; });
}

msns_status msns_config_hash(const msns_config* config, uint64_t* out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] { *out = config->value.hash(); });
}

msns_status msns_run(const msns_config* config, msns_run_summary* summary) {
  if (!config) return null_argument("config");
  return guarded([&] { fill(summary, msns::run_simulation(config->value)); });
}

msns_status msns_resume(const char* checkpoint_path, const msns_config* config,
                        msns_run_summary* summary) {
  if (!checkpoint_path) return null_argument("checkpoint_path");
  if (!config) return null_argument("config");
  return guarded(
      [&] { fill(summary, msns::resume_simulation(checkpoint_path, config->value)); });
}

msns_status msns_validate(const msns_config* config, double tolerance, char** table,
                          int* passed) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const msns::ValidationReport report = msns::validate_suite(config->value, tolerance);
    if (table) *table = duplicate(report.table());
    if (passed) *passed = report.passed ? 1 : 0;
  });
}

msns_status msns_probe_operators(const msns_config* config, uint64_t seed, int count,
                                 char** report_json) {
  if (!config) return null_argument("config");
  if (!report_json) return null_argument("report_json");
  return guarded([&] {
    *report_json = duplicate(msns::probe_operators_report(config->value, seed, count));
  });
}

msns_status msns_fit_q(const msns_config* config, double t, double* q, double* residual,
                       int* degenerate) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const msns::QFit fit = msns::fit_q_for_config(config->value, t);
    if (q) *q = fit.q;
    if (residual) *residual = fit.residual;
    if (degenerate) *degenerate = fit.degenerate ? 1 : 0;
  });
}

msns_status msns_field_from_config(const msns_config* config, msns_field** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    const msns::Grid grid = msns::make_grid(config->value.n, config->value.length);
    *out = new msns_field{msns::make_flow(grid, config->value.flow)};
  });
}

msns_status msns_checkpoint_read(const char* path, msns_field** out, double* t) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    msns::Checkpoint c = msns::read_checkpoint(path);
    if (t) *t = c.t;
    *out = new msns_field{std::move(c.u)};
  });
}

msns_status msns_field_norms(const msns_field* field, double* sup_norm, double* l2_norm,
                             double* max_divergence) {
  if (!field) return null_argument("field");
  return guarded([&] {
    if (sup_norm) *sup_norm = msns::sup_norm(field->value);
    if (l2_norm) *l2_norm = msns::l2_norm(field->value);
    if (max_divergence) *max_divergence = msns::max_abs_divergence(field->value);
  });
}

msns_status msns_field_samples(const msns_field* field, double* buffer, size_t length, int* n) {
  if (!field) return null_argument("field");
  const auto data = field->value.data();
  if (n) *n = field->value.grid().n();
  if (!buffer) return MSNS_OK;
  if (length < data.size()) {
    last_error = "buffer holds " + std::to_string(length) + " values, field needs " +
                 std::to_string(data.size());
    return MSNS_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(buffer, data.data(), data.size() * sizeof(double));
  return MSNS_OK;
}

void msns_field_free(msns_field* field) { delete field; }

void msns_string_free(char* text) { std::free(text); }

}  // extern "C"
