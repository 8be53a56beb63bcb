#pragma once

#include <cstdint>
#include <string>

#include "msns/field.hpp"

namespace msns {

enum class FlowKind { TaylorGreen, Abc, RandomSchwartz };

const char* to_string(FlowKind kind) noexcept;
/// Throws Error(InvalidArgument) for unknown names.
FlowKind flow_kind_from_string(const std::string& name);

struct FlowSpec {
  FlowKind kind = FlowKind::TaylorGreen;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  double decay_scale = 2.0;
  double abc_a = 1.0;
  double abc_b = 1.0;
  double abc_c = 1.0;

  void validate() const;
};

/// a (cos x1 sin x2, -sin x1 cos x2, 0).
RealVectorField taylor_green(const Grid& grid, double amplitude = 1.0);

/// (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1); curl u = u.
RealVectorField abc_flow(const Grid& grid, double a, double b, double c);

/// Zero-mean, divergence-free field with |u_hat(k)| = s * exp(-|k|^2 / (2 sigma^2))
/// on every non-Nyquist mode, random directions orthogonal to k and random
/// phases. s is chosen so that sup_norm of the result equals `amplitude`.
RealVectorField random_schwartz_field(const Grid& grid, std::uint64_t seed,
                                      double decay_scale, double amplitude);

RealVectorField make_flow(const Grid& grid, const FlowSpec& spec);

/// u0 * exp(-2 nu k0^2 t) for Taylor-Green, u0 * exp(-nu k0^2 t) for ABC,
/// with k0 = 2 pi / L (k0 = 1 on the 2 pi box).
RealVectorField exact_decay_solution(FlowKind kind, const RealVectorField& initial,
                                     double t, double nu);

}  // namespace msns
