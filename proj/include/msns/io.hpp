#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "msns/field.hpp"
#include "msns/flows.hpp"
#include "msns/operators.hpp"
#include "msns/timestepper.hpp"

namespace msns {

struct OutputConfig {
  std::string directory = "msns_out";
  /// Write a checkpoint every this many windows; 0 disables checkpoints.
  int checkpoint_every = 1;
  std::string diagnostics_file = "diagnostics.csv";
};

struct RunConfig {
  int n = 32;
  double length = 2.0 * std::numbers::pi;
  PhysicalParams physics;
  MollifierParams mollifier;
  WindowConfig window;
  FlowSpec flow;
  double horizon = 1.0;
  OutputConfig output;

  /// Hash of everything that determines the trajectory (grid, physics,
  /// mollifier, window, flow); horizon and output are excluded.
  std::uint64_t hash() const;
};

/// Parses and validates a JSON run configuration. Throws Error(Io) when the
/// file cannot be read and Error(Config) listing every failing field path.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
std::string to_json(const RunConfig& config);

inline constexpr const char* kDiagnosticsHeader =
    "t,sup_norm,l2_energy,enstrophy,max_divergence,picard_iters,picard_final_residual";

/// Atomic write (temp file then rename); 17 significant digits.
void write_diagnostics(const std::vector<DiagnosticsRecord>& records,
                       const std::filesystem::path& path);
/// Throws Error(MalformedCsv) naming the missing column or bad row.
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  RealVectorField u;
  double t = 0.0;
  double nu = 0.0;
  double epsilon = 0.0;
  std::uint64_t config_hash = 0;
};

/// Little-endian layout: "MSNS", u32 version, u32 n, f64 L, f64 t, f64 nu,
/// f64 epsilon, u64 config hash, 3 n^3 f64 samples (component-major), u32
/// CRC32 of every preceding byte.
void write_checkpoint(const RealVectorField& u, double t, double nu, double epsilon,
                      std::uint64_t config_hash, const std::filesystem::path& path);
/// Throws Error(BadMagic), Error(BadVersion) or Error(BadCrc); truncation
/// surfaces as a CRC failure.
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string checkpoint_name(std::size_t completed_windows);

}  // namespace msns
