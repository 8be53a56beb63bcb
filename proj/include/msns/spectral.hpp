#pragma once

#include <vector>

#include "msns/field.hpp"

namespace msns {

// Transform pair. The forward kernel is e^{+i(x,k)} and carries the 1/n^3
// factor, so coefficients are Fourier-series amplitudes:
//   c(k) = n^-3 sum_x f(x) e^{+i k.x},   f(x) = sum_k c(k) e^{-i k.x}.
// Parseval: l2_norm(f)^2 = L^3 * sum_k |c(k)|^2.

inline constexpr double kRoundTripTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-10;

SpectralVectorField fft_forward(const RealVectorField& field);

/// Throws Error(NonHermitianInput) when the imaginary residue exceeds
/// kHermitianTolerance relative to the largest output magnitude.
RealVectorField fft_inverse(const SpectralVectorField& spectrum);

/// Scalar transforms used for divergence and pressure.
std::vector<Complex> fft_forward_scalar(const Grid& grid, std::span<const double> samples);
std::vector<double> fft_inverse_scalar(const Grid& grid, std::span<const Complex> coeffs);

/// Multiplies every coefficient by -i k_axis (axis in 1..3); the Nyquist
/// plane of that axis is zeroed.
SpectralVectorField spectral_derivative(const SpectralVectorField& spectrum, int axis);

/// Two-thirds truncation of all components.
SpectralVectorField dealias(const SpectralVectorField& spectrum);
bool survives_dealias(const Grid& grid, std::size_t mode) noexcept;

/// Sum over components of max |samples|.
double sup_norm(const RealVectorField& field) noexcept;

/// sqrt(sum_i int |u_i|^2 dx) with midpoint quadrature on the grid.
double l2_norm(const RealVectorField& field) noexcept;

/// L^3 * sum |c|^2, which equals l2_norm^2 of the inverse transform.
double parseval_energy(const SpectralVectorField& spectrum) noexcept;

}  // namespace msns
