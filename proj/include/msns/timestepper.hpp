#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msns/field.hpp"
#include "msns/nonlinear.hpp"
#include "msns/operators.hpp"

namespace msns {

/// Smallest accepted window length; shorter windows are rejected.
inline constexpr double kMinWindowLength = 1e-6;
/// Modes whose mollifier falls below this are updated with the literal map.
inline constexpr double kMollifierUnderflowGuard = 1e-300;

enum class WindowMode {
  /// Iterate u = -S (u.grad)u + E u + B u0 exactly as written.
  PaperLiteral,
  /// Eliminate the E term per mode and iterate only on the nonlinearity.
  ModeSolved,
};

const char* to_string(WindowMode mode) noexcept;
WindowMode window_mode_from_string(const std::string& name);

struct WindowConfig {
  double delta_t = 1e-2;
  double picard_tol = 1e-10;
  int picard_max_iters = 50;
  /// Uniform Duhamel samples per window, both ends included.
  int substeps = 5;
  WindowMode mode = WindowMode::ModeSolved;
  DealiasPolicy dealias = DealiasPolicy::TwoThirds;

  void validate() const;
};

struct PicardTrace {
  /// max over window samples of sup_norm(u^{m+1} - u^m), one per iteration.
  std::vector<double> residuals;
  bool converged = false;
  /// Measured ||Phi(u + eta) - Phi(u)|| / ||eta|| for a fixed small
  /// divergence-free perturbation eta, evaluated at the last iterate.
  double contraction_ratio = 0.0;

  int iterations() const noexcept { return static_cast<int>(residuals.size()); }
  double final_residual() const noexcept { return residuals.empty() ? 0.0 : residuals.back(); }
};

struct WindowResult {
  RealVectorField u_end;
  PicardTrace trace;
};

/// Solves one window [0, delta_t] of the integral equation by successive
/// substitution on the sampled window path. Throws Error(NonConvergence) when
/// the residual does not reach picard_tol within picard_max_iters.
WindowResult picard_window(const RealVectorField& u_start, const WindowConfig& cfg,
                           const PhysicalParams& params, const MollifierParams& mollifier);

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_norm = 0.0;
  double l2_energy = 0.0;
  double enstrophy = 0.0;
  double max_divergence = 0.0;
  int picard_iters = 0;
  double picard_final_residual = 0.0;

  bool operator==(const DiagnosticsRecord&) const = default;
};

DiagnosticsRecord measure(const RealVectorField& u, double t, int picard_iters = 0,
                          double picard_final_residual = 0.0);

struct Trajectory {
  /// State at the start of the march (t = start time, no Picard data).
  DiagnosticsRecord initial;
  /// One record per completed window or step.
  std::vector<DiagnosticsRecord> records;
  std::vector<PicardTrace> traces;
  /// Per-window states, filled only when requested.
  std::vector<RealVectorField> states;
  RealVectorField final_state;
};

struct MarchOptions {
  /// Global index of the first window; window k ends at (k + 1) * delta_t.
  std::size_t first_window = 0;
  bool keep_states = false;
  /// Called after every completed window with its global index and end state.
  std::function<void(std::size_t window, double t, const RealVectorField& u)> on_window;
};

/// Number of windows that cover [0, horizon].
std::size_t window_count(double horizon, double delta_t);

/// Repeats picard_window until the window count covering [0, horizon] is
/// reached, rebasing the initial velocity each window. NonConvergence is
/// rethrown with the failing window index.
Trajectory march(const RealVectorField& u0, double horizon, const WindowConfig& cfg,
                 const PhysicalParams& params, const MollifierParams& mollifier,
                 const MarchOptions& options = {});

/// -t S^t (u0.grad)u0 + E u0 + B(u0, t), no iteration. First order in t.
RealVectorField approx_step(const RealVectorField& u0, double t, const PhysicalParams& params,
                            const MollifierParams& mollifier,
                            DealiasPolicy dealias = DealiasPolicy::TwoThirds);

struct QFit {
  double q = 0.0;
  double residual = 0.0;
  /// Set when the residual does not depend on q (zero initial data).
  bool degenerate = false;
};

/// Residual sup norm of the uniform-rescaling ansatz u = u0 (1 - t e^{-q}).
class QResidual {
 public:
  QResidual(const RealVectorField& u0, double t, const PhysicalParams& params,
            const MollifierParams& mollifier,
            DealiasPolicy dealias = DealiasPolicy::TwoThirds);

  double operator()(double q) const;

 private:
  double t_;
  RealVectorField initial_;
  RealVectorField duhamel_;
  RealVectorField complement_;
  RealVectorField heat_;
};

inline constexpr double kQSearchMax = 50.0;

/// Minimizes QResidual over q in [0, 50]: coarse scan for a bracket, then
/// Brent refinement. Throws Error(NoBracket) when the scan minimum sits on
/// the interval boundary.
QFit fit_q_ansatz(const RealVectorField& u0, double t, const PhysicalParams& params,
                  const MollifierParams& mollifier,
                  DealiasPolicy dealias = DealiasPolicy::TwoThirds);

struct MonotonicityViolation {
  std::size_t window;
  double t;
  double previous;
  double current;
};

struct AprioriReport {
  std::vector<MonotonicityViolation> sup_violations;
  std::vector<MonotonicityViolation> l2_violations;

  bool sup_monotone() const noexcept { return sup_violations.empty(); }
  bool l2_monotone() const noexcept { return l2_violations.empty(); }
};

/// Flags every window whose sup_norm or L2 norm exceeds the previous one by
/// more than the slack. Does not throw on violations.
AprioriReport apriori_monitor(const Trajectory& trajectory, double sup_slack = 1e-10,
                              double l2_slack = 1e-10);

/// Reference integrator: classical fourth-order Runge-Kutta in the
/// integrating-factor variable with the exact heat factor and the
/// Leray-projected nonlinearity, no mollifier. Throws Error(CflViolation) if
/// sup_norm(u) * dt * n / L exceeds 0.5.
Trajectory oracle_integrate(const RealVectorField& u0, double horizon, double dt,
                            const PhysicalParams& params,
                            DealiasPolicy dealias = DealiasPolicy::TwoThirds,
                            bool keep_states = false);

}  // namespace msns
