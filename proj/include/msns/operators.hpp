#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "msns/field.hpp"

namespace msns {

using Wavevector = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

struct MollifierParams {
  double epsilon = 1e-3;

  /// Throws Error(InvalidArgument) unless 0 < epsilon < 1.
  void validate() const;
};

struct PhysicalParams {
  /// nu = 0 is the inviscid limit.
  double nu = 0.0;

  void validate() const;
};

/// exp(-eps^3 / |k|^2), continuously extended by 0 at k = 0.
double mollifier_value(const Wavevector& k, double epsilon) noexcept;

/// Leray projector delta_ij - k_i k_j / |k|^2. Throws Error(ZeroWavenumber)
/// at k = 0; callers map the mean mode themselves.
Matrix3 leray_kernel(const Wavevector& k);

/// Largest singular value of a symmetric 3x3 matrix.
double spectral_norm_symmetric(const Matrix3& m) noexcept;

// Per-mode multipliers. All are real and even in k.

/// e^{-nu|k|^2 t} * mollifier.
double b_multiplier(const Wavevector& k, double t, const PhysicalParams& params,
                    const MollifierParams& mollifier) noexcept;
/// 1 - mollifier; exactly 1 at k = 0.
double e_multiplier(const Wavevector& k, const MollifierParams& mollifier) noexcept;
/// Operator-norm bound e^{-nu|k|^2 (t - t_star)} * mollifier * ||P(k)||_2 of
/// apply_S_kernel; 0 at k = 0.
double s_kernel_multiplier_norm(const Wavevector& k, double t, double t_star,
                                const PhysicalParams& params,
                                const MollifierParams& mollifier);
/// Operator-norm bound t * e^{-nu|k|^2 (t - t_star)} * mollifier * ||P(k)||_2.
double s_multiplier_norm(const Wavevector& k, double t, double t_star,
                         const PhysicalParams& params,
                         const MollifierParams& mollifier);

/// Heat semigroup times mollifier applied to the initial velocity.
SpectralVectorField apply_B(const SpectralVectorField& initial, double t,
                            const PhysicalParams& params, const MollifierParams& mollifier);

/// Mollifier complement; the mean mode passes through unchanged.
SpectralVectorField apply_E(const SpectralVectorField& velocity,
                            const MollifierParams& mollifier);

/// Frozen-time Duhamel kernel without the leading factor t:
///   e^{-nu|k|^2 (t - t_star)} * mollifier * P(k) * F(k).
/// t_star defaults to t/2. Throws unless 0 <= t_star <= t.
SpectralVectorField apply_S_kernel(const SpectralVectorField& forcing, double t,
                                   std::optional<double> t_star,
                                   const PhysicalParams& params,
                                   const MollifierParams& mollifier);

/// t * apply_S_kernel: the one-point quadrature of the Duhamel integral.
SpectralVectorField apply_S_frozen(const SpectralVectorField& forcing, double t,
                                   std::optional<double> t_star,
                                   const PhysicalParams& params,
                                   const MollifierParams& mollifier);

struct ForcingSample {
  double tau;
  std::reference_wrapper<const SpectralVectorField> forcing;
};

/// Composite trapezoid over the history of
///   int_0^t e^{-nu|k|^2 (t - tau)} * mollifier * P(k) * F(k, tau) dtau.
/// History must be strictly increasing and span [0, t].
SpectralVectorField apply_S_quadrature(std::span<const ForcingSample> history, double t,
                                       const PhysicalParams& params,
                                       const MollifierParams& mollifier);

/// Leray projection of a spectrum. The mean mode and modes with a Nyquist
/// index map to zero; the same holds for both S variants.
SpectralVectorField leray_project(const SpectralVectorField& spectrum);

enum class OperatorId { B, E, S };

const char* to_string(OperatorId id) noexcept;

/// Which probe family to draw.
struct ProbeBand {
  /// Random fields supported on the lattice shell |m|^2 = shell (m integer
  /// axis indices), so every mode in a sample sees the same multiplier.
  int shell = 1;
  /// Adds a constant mean of unit size per component; the oscillatory part is
  /// scaled down to `oscillation` so the mean dominates.
  bool include_mean = false;
  double oscillation = 1e-3;
};

struct MultiplierReport {
  OperatorId op = OperatorId::B;
  int shell = 1;
  bool include_mean = false;
  double t = 0.0;
  double epsilon = 0.0;
  /// Largest per-mode multiplier magnitude over the probe support.
  double max_multiplier = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  int samples = 0;
  /// The literal claimed bound (1 for B and S, epsilon for E) and whether the
  /// measured maximum respected it. Recorded, not enforced.
  double claimed_bound = 0.0;
  bool claim_holds = false;
};

/// Draws `count` seeded probe fields and records sup_norm(op f) / sup_norm(f).
/// S is probed through apply_S_kernel at t_star = t/2.
MultiplierReport probe_operator_norm(OperatorId op, std::uint64_t seed, int count,
                                     const Grid& grid, const PhysicalParams& params,
                                     const MollifierParams& mollifier, double t,
                                     const ProbeBand& band = {});

/// The probe field generator, exposed for tests.
RealVectorField probe_field(const Grid& grid, std::uint64_t seed, const ProbeBand& band);

/// sup_norm(B(u, 0) + E(u) - u): the mollifier split evaluated at t = 0.
double initial_split_gap(const RealVectorField& u, const MollifierParams& mollifier);

std::string to_json(const MultiplierReport& report);

}  // namespace msns
