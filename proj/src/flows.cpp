#include "msns/flows.hpp"

#include <cmath>
#include <numbers>

#include "msns/error.hpp"
#include "msns/random.hpp"
#include "msns/spectral.hpp"

namespace msns {
namespace {

double base_wavenumber(const Grid& grid) { return 2.0 * std::numbers::pi / grid.length(); }

template <typename Fn>
RealVectorField sample(const Grid& grid, Fn&& fn) {
  RealVectorField u(grid);
  const int n = grid.n();
  auto u1 = u.component(0);
  auto u2 = u.component(1);
  auto u3 = u.component(2);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        const std::size_t m = grid.index(i1, i2, i3);
        const auto v = fn(grid.coordinate(i1), grid.coordinate(i2), grid.coordinate(i3));
        u1[m] = v[0];
        u2[m] = v[1];
        u3[m] = v[2];
      }
    }
  }
  return u;
}

}  // namespace

const char* to_string(FlowKind kind) noexcept {
  switch (kind) {
    case FlowKind::TaylorGreen: return "taylor_green";
    case FlowKind::Abc: return "abc";
    case FlowKind::RandomSchwartz: return "random_schwartz";
  }
  return "?";
}

FlowKind flow_kind_from_string(const std::string& name) {
  if (name == "taylor_green") return FlowKind::TaylorGreen;
  if (name == "abc") return FlowKind::Abc;
  if (name == "random_schwartz") return FlowKind::RandomSchwartz;
  throw Error(ErrorKind::InvalidArgument, "unknown flow kind '" + name + "'");
}

void FlowSpec::validate() const {
  if (!std::isfinite(amplitude)) {
    throw Error(ErrorKind::InvalidArgument, "flow.amplitude must be finite");
  }
  if (!(decay_scale > 0.0) || !std::isfinite(decay_scale)) {
    throw Error(ErrorKind::InvalidArgument, "flow.decay_scale must be positive");
  }
  if (!std::isfinite(abc_a) || !std::isfinite(abc_b) || !std::isfinite(abc_c)) {
    throw Error(ErrorKind::InvalidArgument, "flow ABC coefficients must be finite");
  }
}

RealVectorField taylor_green(const Grid& grid, double amplitude) {
  const double k = base_wavenumber(grid);
  return sample(grid, [&](double x1, double x2, double) {
    return std::array<double, 3>{amplitude * std::cos(k * x1) * std::sin(k * x2),
                                 -amplitude * std::sin(k * x1) * std::cos(k * x2), 0.0};
  });
}

RealVectorField abc_flow(const Grid& grid, double a, double b, double c) {
  const double k = base_wavenumber(grid);
  return sample(grid, [&](double x1, double x2, double x3) {
    return std::array<double, 3>{a * std::sin(k * x3) + c * std::cos(k * x2),
                                 b * std::sin(k * x1) + a * std::cos(k * x3),
                                 c * std::sin(k * x2) + b * std::cos(k * x1)};
  });
}

RealVectorField random_schwartz_field(const Grid& grid, std::uint64_t seed,
                                      double decay_scale, double amplitude) {
  if (!(decay_scale > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "decay_scale must be positive");
  }
  const int n = grid.n();
  RandomStream rng(seed);
  SpectralVectorField spectrum(grid);
  const double two_sigma2 = 2.0 * decay_scale * decay_scale;
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        if (grid.is_nyquist(i1) || grid.is_nyquist(i2) || grid.is_nyquist(i3)) continue;
        const std::size_t mode = grid.index(i1, i2, i3);
        const std::size_t partner =
            grid.index(grid.mirror(i1), grid.mirror(i2), grid.mirror(i3));
        if (partner <= mode) continue;  // skips the mean and already-drawn pairs
        const double k[3] = {grid.wavenumber(i1), grid.wavenumber(i2), grid.wavenumber(i3)};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        std::array<Complex, 3> v{};
        double norm = 0.0;
        while (norm < 1e-8) {
          for (auto& x : v) x = Complex(rng.normal(), rng.normal());
          const Complex kv = (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]) / k2;
          norm = 0.0;
          for (int c = 0; c < 3; ++c) {
            v[c] -= k[c] * kv;
            norm += std::norm(v[c]);
          }
          norm = std::sqrt(norm);
        }
        const double envelope = std::exp(-k2 / two_sigma2);
        for (auto& x : v) x *= envelope / norm;
        spectrum.set(mode, v);
        for (auto& x : v) x = std::conj(x);
        spectrum.set(partner, v);
      }
    }
  }
  RealVectorField field = fft_inverse(spectrum);
  const double peak = sup_norm(field);
  if (peak > 0.0) field *= amplitude / peak;
  return field;
}

RealVectorField make_flow(const Grid& grid, const FlowSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case FlowKind::TaylorGreen: return taylor_green(grid, spec.amplitude);
    case FlowKind::Abc:
      return abc_flow(grid, spec.amplitude * spec.abc_a, spec.amplitude * spec.abc_b,
                      spec.amplitude * spec.abc_c);
    case FlowKind::RandomSchwartz:
      return random_schwartz_field(grid, spec.seed, spec.decay_scale, spec.amplitude);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown flow kind");
}

RealVectorField exact_decay_solution(FlowKind kind, const RealVectorField& initial,
                                     double t, double nu) {
  const double k2 = std::pow(base_wavenumber(initial.grid()), 2);
  double rate = 0.0;
  switch (kind) {
    case FlowKind::TaylorGreen: rate = 2.0 * nu * k2; break;
    case FlowKind::Abc: rate = nu * k2; break;
    default:
      throw Error(ErrorKind::InvalidArgument,
                  std::string("no exact solution for flow kind ") + to_string(kind));
  }
  if (t == 0.0) return initial;
  return std::exp(-rate * t) * initial;
}

}  // namespace msns
