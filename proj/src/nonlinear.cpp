#include "msns/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modes.hpp"
#include "msns/error.hpp"
#include "msns/operators.hpp"
#include "msns/spectral.hpp"

namespace msns {

RealVectorField convective_term(const SpectralVectorField& uhat, DealiasPolicy policy) {
  const SpectralVectorField velocity =
      policy == DealiasPolicy::TwoThirds ? dealias(uhat) : uhat;
  const RealVectorField u = fft_inverse(velocity);
  RealVectorField result(uhat.grid());
  for (int axis = 1; axis <= 3; ++axis) {
    const RealVectorField grad = fft_inverse(spectral_derivative(velocity, axis));
    const auto carrier = u.component(axis - 1);
    for (int c = 0; c < 3; ++c) {
      auto out = result.component(c);
      const auto d = grad.component(c);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += carrier[i] * d[i];
    }
  }
  return result;
}

RealVectorField convective_term(const RealVectorField& u, DealiasPolicy policy) {
  return convective_term(fft_forward(u), policy);
}

Divergence divergence(const RealVectorField& u) {
  const Grid& grid = u.grid();
  const SpectralVectorField uhat = fft_forward(u);
  std::vector<Complex> div(grid.size());
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        const std::size_t m = grid.index(i1, i2, i3);
        const int idx[3] = {i1, i2, i3};
        Complex sum{};
        for (int c = 0; c < 3; ++c) {
          if (grid.is_nyquist(idx[c])) continue;
          sum += Complex(0.0, -grid.wavenumber(idx[c])) * uhat.component(c)[m];
        }
        div[m] = sum;
      }
    }
  }
  Divergence result;
  result.values = fft_inverse_scalar(grid, div);
  for (double v : result.values) result.max_abs = std::max(result.max_abs, std::abs(v));
  return result;
}

double max_abs_divergence(const RealVectorField& u) { return divergence(u).max_abs; }

RealVectorField curl(const RealVectorField& u) {
  const SpectralVectorField uhat = fft_forward(u);
  const SpectralVectorField d1 = spectral_derivative(uhat, 1);
  const SpectralVectorField d2 = spectral_derivative(uhat, 2);
  const SpectralVectorField d3 = spectral_derivative(uhat, 3);
  SpectralVectorField w(u.grid());
  for (std::size_t m = 0; m < u.grid().size(); ++m) {
    w.component(0)[m] = d2.component(2)[m] - d3.component(1)[m];
    w.component(1)[m] = d3.component(0)[m] - d1.component(2)[m];
    w.component(2)[m] = d1.component(1)[m] - d2.component(0)[m];
  }
  return fft_inverse(w);
}

RealVectorField pressure_gradient(const RealVectorField& u, DealiasPolicy policy,
                                  double tolerance) {
  const double div = max_abs_divergence(u);
  if (div > tolerance * std::max(1.0, sup_norm(u))) {
    std::ostringstream msg;
    msg << "pressure solve needs a divergence-free velocity, max|div u| = " << div;
    throw Error(ErrorKind::NotDivergenceFree, msg.str());
  }
  const SpectralVectorField nhat = fft_forward(convective_term(u, policy));
  // -(I - P) N = P N - N
  SpectralVectorField grad_p = leray_project(nhat);
  grad_p -= nhat;
  grad_p.set(0, {});
  return fft_inverse(grad_p);
}

}  // namespace msns
