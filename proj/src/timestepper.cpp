#include "msns/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "modes.hpp"
#include "msns/error.hpp"
#include "msns/flows.hpp"
#include "msns/spectral.hpp"

namespace msns {

using detail::for_each_mode;
using detail::norm2;

const char* to_string(WindowMode mode) noexcept {
  return mode == WindowMode::PaperLiteral ? "paper_literal" : "mode_solved";
}

WindowMode window_mode_from_string(const std::string& name) {
  if (name == "paper_literal") return WindowMode::PaperLiteral;
  if (name == "mode_solved") return WindowMode::ModeSolved;
  throw Error(ErrorKind::InvalidArgument, "unknown window mode '" + name + "'");
}

void WindowConfig::validate() const {
  if (!(delta_t >= kMinWindowLength) || !std::isfinite(delta_t)) {
    throw Error(ErrorKind::InvalidArgument, "window.delta_t must be finite and >= 1e-6");
  }
  if (!(picard_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "window.picard_tol must be positive");
  }
  if (picard_max_iters < 1) {
    throw Error(ErrorKind::InvalidArgument, "window.picard_max_iters must be >= 1");
  }
  if (substeps < 2) {
    throw Error(ErrorKind::InvalidArgument, "window.substeps must be >= 2");
  }
}

namespace {

// Sampled window path: node j sits at tau_j = j * delta_t / (substeps - 1).
struct WindowPath {
  std::vector<SpectralVectorField> spectral;
  std::vector<RealVectorField> physical;
};

// Unit-sized fixed perturbation used to measure the local contraction.
RealVectorField contraction_probe(const Grid& grid) {
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  RealVectorField eta = random_schwartz_field(grid, 0x5eedULL, 3.0 * k0, 1.0);
  // Drop what the nonlinearity cannot see so the probe is resolved.
  return fft_inverse(dealias(fft_forward(eta)));
}

class WindowSolver {
 public:
  WindowSolver(const RealVectorField& u_start, const WindowConfig& cfg,
               const PhysicalParams& params, const MollifierParams& mollifier)
      : cfg_(cfg), params_(params), mollifier_(mollifier), grid_(u_start.grid()) {
    const int count = cfg.substeps;
    taus_.resize(count);
    for (int j = 0; j < count; ++j) taus_[j] = cfg.delta_t * j / (count - 1);
    taus_.back() = cfg.delta_t;
    initial_hat_ = fft_forward(u_start);
    initial_forcing_ = fft_forward(convective_term(initial_hat_, cfg.dealias));
    heat_.reserve(count);
    for (int j = 0; j < count; ++j) {
      heat_.push_back(apply_B(initial_hat_, taus_[j], params, mollifier));
    }
    mollifier_values_.resize(grid_.size());
    complement_values_.resize(grid_.size());
    for_each_mode(grid_, [&](std::size_t m, const Wavevector& k) {
      mollifier_values_[m] = mollifier_value(k, mollifier.epsilon);
      complement_values_[m] = e_multiplier(k, mollifier);
    });
    // Nodes are uniform, so the Duhamel kernel between nodes i <= j depends
    // on j - i only: kernel_[d][m] = exp(-nu |k|^2 d h) * mollifier.
    const double h = cfg.delta_t / (count - 1);
    kernel_.assign(count, std::vector<double>(grid_.size(), 0.0));
    for_each_mode(grid_, [&](std::size_t m, const Wavevector& k) {
      const double k2 = norm2(k);
      for (int d = 0; d < count; ++d) {
        kernel_[d][m] = std::exp(-params.nu * k2 * (d * h)) * mollifier_values_[m];
      }
    });
  }

  WindowPath initial_path(const RealVectorField& u_start) const {
    WindowPath path;
    path.spectral.assign(taus_.size(), initial_hat_);
    path.physical.assign(taus_.size(), u_start);
    return path;
  }

  // One application of the fixed-point map to every node after the first.
  WindowPath apply(const WindowPath& path) const {
    const std::size_t count = taus_.size();
    std::vector<SpectralVectorField> forcing;
    forcing.reserve(count);
    forcing.push_back(initial_forcing_);
    for (std::size_t j = 1; j < count; ++j) {
      forcing.push_back(fft_forward(convective_term(path.spectral[j], cfg_.dealias)));
    }
    const double h = cfg_.delta_t / static_cast<double>(count - 1);
    std::vector<SpectralVectorField> duhamel(count, SpectralVectorField(grid_));
    detail::for_each_interior_mode(grid_, [&](std::size_t m, const Wavevector& k) {
      const double k2 = norm2(k);
      if (k2 == 0.0) return;
      for (std::size_t j = 1; j < count; ++j) {
        // Composite trapezoid over nodes 0..j, then the Leray projection.
        std::array<Complex, 3> sum{};
        for (std::size_t i = 0; i <= j; ++i) {
          const double w = (i == 0 || i == j ? 0.5 * h : h) * kernel_[j - i][m];
          for (int c = 0; c < 3; ++c) sum[c] += w * forcing[i].component(c)[m];
        }
        const Complex kf = (k[0] * sum[0] + k[1] * sum[1] + k[2] * sum[2]) / k2;
        for (int c = 0; c < 3; ++c) duhamel[j].component(c)[m] = sum[c] - k[c] * kf;
      }
    });

    WindowPath next;
    next.spectral.push_back(path.spectral[0]);
    next.physical.push_back(path.physical[0]);
    for (std::size_t j = 1; j < count; ++j) {
      SpectralVectorField u(grid_);
      for (std::size_t m = 0; m < grid_.size(); ++m) {
        const double delta = mollifier_values_[m];
        const bool solved = cfg_.mode == WindowMode::ModeSolved &&
                            delta > kMollifierUnderflowGuard;
        for (int c = 0; c < 3; ++c) {
          const Complex mollified = heat_[j].component(c)[m] - duhamel[j].component(c)[m];
          const Complex complement = complement_values_[m] * path.spectral[j].component(c)[m];
          u.component(c)[m] = solved ? mollified / delta : mollified + complement;
        }
      }
      next.physical.push_back(fft_inverse(u));
      next.spectral.push_back(std::move(u));
    }
    return next;
  }

  static double distance(const WindowPath& a, const WindowPath& b) {
    double worst = 0.0;
    for (std::size_t j = 1; j < a.physical.size(); ++j) {
      const double d = sup_norm(a.physical[j] - b.physical[j]);
      if (!std::isfinite(d)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, d);
    }
    return worst;
  }

  double contraction(const WindowPath& previous, const WindowPath& mapped) const {
    const double scale = 1e-6 * std::max(1.0, sup_norm(previous.physical.front()));
    RealVectorField eta = contraction_probe(grid_);
    eta *= scale;
    const SpectralVectorField eta_hat = fft_forward(eta);
    WindowPath perturbed = previous;
    for (std::size_t j = 1; j < perturbed.spectral.size(); ++j) {
      perturbed.spectral[j] += eta_hat;
      perturbed.physical[j] += eta;
    }
    const WindowPath response = apply(perturbed);
    return distance(response, mapped) / sup_norm(eta);
  }

 private:
  WindowConfig cfg_;
  PhysicalParams params_;
  MollifierParams mollifier_;
  Grid grid_;
  std::vector<double> taus_;
  SpectralVectorField initial_hat_;
  SpectralVectorField initial_forcing_;
  std::vector<SpectralVectorField> heat_;
  std::vector<double> mollifier_values_;
  std::vector<double> complement_values_;
  std::vector<std::vector<double>> kernel_;
};

}  // namespace

WindowResult picard_window(const RealVectorField& u_start, const WindowConfig& cfg,
                           const PhysicalParams& params, const MollifierParams& mollifier) {
  cfg.validate();
  params.validate();
  mollifier.validate();
  const double div = max_abs_divergence(u_start);
  if (div > 1e-8 * std::max(1.0, sup_norm(u_start))) {
    std::ostringstream msg;
    msg << "window start is not divergence-free, max|div u| = " << div;
    throw Error(ErrorKind::NotDivergenceFree, msg.str());
  }

  WindowSolver solver(u_start, cfg, params, mollifier);
  WindowPath current = solver.initial_path(u_start);
  WindowPath previous;
  PicardTrace trace;
  for (int it = 0; it < cfg.picard_max_iters; ++it) {
    WindowPath next = solver.apply(current);
    const double residual = WindowSolver::distance(next, current);
    trace.residuals.push_back(residual);
    previous = std::move(current);
    current = std::move(next);
    if (!std::isfinite(residual)) break;
    if (residual <= cfg.picard_tol) {
      trace.converged = true;
      break;
    }
  }
  if (std::isfinite(trace.final_residual())) {
    trace.contraction_ratio = solver.contraction(previous, current);
  } else {
    trace.contraction_ratio = std::numeric_limits<double>::infinity();
  }
  if (!trace.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach tolerance " << cfg.picard_tol << " in "
        << trace.iterations() << " iterations (last residual " << trace.final_residual()
        << ", contraction estimate " << trace.contraction_ratio << ")";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }
  return {std::move(current.physical.back()), std::move(trace)};
}

DiagnosticsRecord measure(const RealVectorField& u, double t, int picard_iters,
                          double picard_final_residual) {
  DiagnosticsRecord r;
  r.t = t;
  r.sup_norm = sup_norm(u);
  const double l2 = l2_norm(u);
  r.l2_energy = 0.5 * l2 * l2;
  const double w = l2_norm(curl(u));
  r.enstrophy = 0.5 * w * w;
  r.max_divergence = max_abs_divergence(u);
  r.picard_iters = picard_iters;
  r.picard_final_residual = picard_final_residual;
  return r;
}

std::size_t window_count(double horizon, double delta_t) {
  const double windows = std::ceil(horizon / delta_t - 1e-9);
  return static_cast<std::size_t>(std::max(windows, 0.0));
}

Trajectory march(const RealVectorField& u0, double horizon, const WindowConfig& cfg,
                 const PhysicalParams& params, const MollifierParams& mollifier,
                 const MarchOptions& options) {
  cfg.validate();
  const std::size_t total = window_count(horizon, cfg.delta_t);
  if (total == 0) {
    throw Error(ErrorKind::InvalidArgument, "horizon must be >= window.delta_t");
  }
  Trajectory trajectory;
  trajectory.initial = measure(u0, static_cast<double>(options.first_window) * cfg.delta_t);
  RealVectorField u = u0;
  for (std::size_t k = options.first_window; k < total; ++k) {
    WindowResult result;
    try {
      result = picard_window(u, cfg, params, mollifier);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonConvergence) throw;
      throw Error(ErrorKind::NonConvergence,
                  "window " + std::to_string(k) + ": " + e.what());
    }
    u = std::move(result.u_end);
    const double t = static_cast<double>(k + 1) * cfg.delta_t;
    trajectory.records.push_back(
        measure(u, t, result.trace.iterations(), result.trace.final_residual()));
    trajectory.traces.push_back(std::move(result.trace));
    if (options.keep_states) trajectory.states.push_back(u);
    if (options.on_window) options.on_window(k, t, u);
  }
  trajectory.final_state = std::move(u);
  return trajectory;
}

RealVectorField approx_step(const RealVectorField& u0, double t, const PhysicalParams& params,
                            const MollifierParams& mollifier, DealiasPolicy dealias) {
  const SpectralVectorField uhat = fft_forward(u0);
  const SpectralVectorField forcing = fft_forward(convective_term(uhat, dealias));
  SpectralVectorField u = apply_E(uhat, mollifier);
  u += apply_B(uhat, t, params, mollifier);
  u -= apply_S_frozen(forcing, t, std::nullopt, params, mollifier);
  return fft_inverse(u);
}

QResidual::QResidual(const RealVectorField& u0, double t, const PhysicalParams& params,
                     const MollifierParams& mollifier, DealiasPolicy dealias)
    : t_(t), initial_(u0) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "q fit needs t > 0");
  const SpectralVectorField uhat = fft_forward(u0);
  const SpectralVectorField forcing = fft_forward(convective_term(uhat, dealias));
  duhamel_ = fft_inverse(apply_S_frozen(forcing, t, std::nullopt, params, mollifier));
  complement_ = fft_inverse(apply_E(uhat, mollifier));
  heat_ = fft_inverse(apply_B(uhat, t, params, mollifier));
}

double QResidual::operator()(double q) const {
  const double decay = std::exp(-q);
  const double scale = 1.0 - t_ * decay;
  const double forcing_scale = 1.0 - decay;
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto u = initial_.component(c);
    const auto s = duhamel_.component(c);
    const auto e = complement_.component(c);
    const auto b = heat_.component(c);
    double peak = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = scale * u[i] + forcing_scale * s[i] - scale * e[i] - b[i];
      peak = std::max(peak, std::abs(r));
    }
    total += peak;
  }
  return total;
}

QFit fit_q_ansatz(const RealVectorField& u0, double t, const PhysicalParams& params,
                  const MollifierParams& mollifier, DealiasPolicy dealias) {
  const QResidual residual(u0, t, params, mollifier, dealias);
  if (sup_norm(u0) == 0.0) return {0.0, 0.0, true};

  constexpr int kCoarse = 100;
  const double step = kQSearchMax / kCoarse;
  std::vector<double> values(kCoarse + 1);
  for (int i = 0; i <= kCoarse; ++i) values[i] = residual(i * step);
  const auto best = std::min_element(values.begin(), values.end());
  const int index = static_cast<int>(best - values.begin());
  if (*std::max_element(values.begin(), values.end()) == *best) {
    return {index * step, *best, true};
  }
  if (index == 0 || index == kCoarse) {
    std::ostringstream msg;
    msg << "q residual has no interior minimum on [0, " << kQSearchMax
        << "]; smallest residual " << *best << " at q = " << index * step;
    throw Error(ErrorKind::NoBracket, msg.str());
  }
  const auto [q, value] = boost::math::tools::brent_find_minima(
      residual, (index - 1) * step, (index + 1) * step, 52);
  if (value <= *best) return {q, value, false};
  return {index * step, *best, false};
}

AprioriReport apriori_monitor(const Trajectory& trajectory, double sup_slack,
                              double l2_slack) {
  AprioriReport report;
  double sup_prev = trajectory.initial.sup_norm;
  double l2_prev = std::sqrt(2.0 * trajectory.initial.l2_energy);
  for (std::size_t k = 0; k < trajectory.records.size(); ++k) {
    const DiagnosticsRecord& r = trajectory.records[k];
    const double l2 = std::sqrt(2.0 * r.l2_energy);
    if (r.sup_norm > sup_prev + sup_slack) {
      report.sup_violations.push_back({k, r.t, sup_prev, r.sup_norm});
    }
    if (l2 > l2_prev + l2_slack) {
      report.l2_violations.push_back({k, r.t, l2_prev, l2});
    }
    sup_prev = r.sup_norm;
    l2_prev = l2;
  }
  return report;
}

namespace {

// -P F[(u.grad)u] for a spectral velocity.
SpectralVectorField projected_rhs(const SpectralVectorField& uhat, DealiasPolicy dealias) {
  SpectralVectorField rhs = leray_project(fft_forward(convective_term(uhat, dealias)));
  rhs *= -1.0;
  return rhs;
}

void scale_modes(SpectralVectorField& field, const std::vector<double>& factors) {
  for (int c = 0; c < 3; ++c) {
    auto data = field.component(c);
    for (std::size_t m = 0; m < data.size(); ++m) data[m] *= factors[m];
  }
}

}  // namespace

Trajectory oracle_integrate(const RealVectorField& u0, double horizon, double dt,
                            const PhysicalParams& params, DealiasPolicy dealias,
                            bool keep_states) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle dt must be positive");
  params.validate();
  const Grid& grid = u0.grid();
  const std::size_t steps = window_count(horizon, dt);
  std::vector<double> full(grid.size()), half(grid.size());
  for_each_mode(grid, [&](std::size_t m, const Wavevector& k) {
    full[m] = std::exp(-params.nu * norm2(k) * dt);
    half[m] = std::exp(-params.nu * norm2(k) * 0.5 * dt);
  });

  Trajectory trajectory;
  trajectory.initial = measure(u0, 0.0);
  SpectralVectorField u = fft_forward(u0);
  RealVectorField physical = u0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double cfl = sup_norm(physical) * dt * grid.n() / grid.length();
    if (cfl > 0.5) {
      std::ostringstream msg;
      msg << "oracle step " << s << " violates the CFL guard (" << cfl << " > 0.5)";
      throw Error(ErrorKind::CflViolation, msg.str());
    }
    const SpectralVectorField a = projected_rhs(u, dealias);

    SpectralVectorField stage = u;
    stage += 0.5 * dt * a;
    scale_modes(stage, half);
    const SpectralVectorField b = projected_rhs(stage, dealias);

    SpectralVectorField u_half = u;
    scale_modes(u_half, half);
    stage = u_half;
    stage += 0.5 * dt * b;
    const SpectralVectorField c = projected_rhs(stage, dealias);

    SpectralVectorField u_full = u;
    scale_modes(u_full, full);
    SpectralVectorField c_half = c;
    scale_modes(c_half, half);
    stage = u_full;
    stage += dt * c_half;
    const SpectralVectorField d = projected_rhs(stage, dealias);

    SpectralVectorField a_full = a;
    scale_modes(a_full, full);
    SpectralVectorField bc = b;
    bc += c;
    scale_modes(bc, half);
    SpectralVectorField increment = a_full;
    increment += 2.0 * bc;
    increment += d;
    u = u_full;
    u += dt / 6.0 * increment;

    physical = fft_inverse(u);
    trajectory.records.push_back(measure(physical, static_cast<double>(s + 1) * dt));
    if (keep_states) trajectory.states.push_back(physical);
  }
  trajectory.final_state = std::move(physical);
  return trajectory;
}

}  // namespace msns
