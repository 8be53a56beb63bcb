#pragma once

#include <vector>

#include "msns/field.hpp"

namespace msns {

enum class DealiasPolicy { TwoThirds, None };

/// Advective term (u . grad) u in physical space, summed as u_n d_n u_k.
/// The policy truncates the velocity before products are formed.
RealVectorField convective_term(const RealVectorField& u,
                                DealiasPolicy policy = DealiasPolicy::TwoThirds);
RealVectorField convective_term(const SpectralVectorField& uhat,
                                DealiasPolicy policy = DealiasPolicy::TwoThirds);

struct Divergence {
  std::vector<double> values;
  double max_abs = 0.0;
};

Divergence divergence(const RealVectorField& u);
double max_abs_divergence(const RealVectorField& u);

RealVectorField curl(const RealVectorField& u);

/// Pressure gradient of Eq. (u . grad) u = -grad p + (solenoidal part), i.e.
/// F[grad p] = -(I - P) F[(u . grad) u] with the mean of p fixed to zero.
/// Throws Error(NotDivergenceFree) when max|div u| exceeds
/// tolerance * max(1, sup_norm(u)).
RealVectorField pressure_gradient(const RealVectorField& u,
                                  DealiasPolicy policy = DealiasPolicy::TwoThirds,
                                  double tolerance = 1e-8);

}  // namespace msns
