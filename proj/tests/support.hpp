#pragma once

#include <cmath>
#include <cstdint>

#include "msns/field.hpp"
#include "msns/random.hpp"
#include "msns/spectral.hpp"
#include "files.hpp"

namespace msns::testing {

inline RealVectorField white_noise(const Grid& grid, std::uint64_t seed) {
  RandomStream rng(seed);
  RealVectorField u(grid);
  for (double& v : u.data()) v = rng.normal();
  return u;
}

/// Real field built from modes with every |m_axis| <= max_mode.
inline RealVectorField band_limited(const Grid& grid, std::uint64_t seed, int max_mode) {
  RandomStream rng(seed);
  RealVectorField u(grid);
  const int n = grid.n();
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (int c = 0; c < 3; ++c) {
    for (int a = -max_mode; a <= max_mode; ++a) {
      for (int b = -max_mode; b <= max_mode; ++b) {
        for (int d = 0; d <= max_mode; ++d) {
          const double amp = rng.normal();
          const double phase = 2.0 * std::numbers::pi * rng.uniform();
          auto comp = u.component(c);
          for (int i1 = 0; i1 < n; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
              for (int i3 = 0; i3 < n; ++i3) {
                const double arg = k0 * (a * grid.coordinate(i1) + b * grid.coordinate(i2) +
                                         d * grid.coordinate(i3));
                comp[grid.index(i1, i2, i3)] += amp * std::cos(arg + phase);
              }
            }
          }
        }
      }
    }
  }
  return u;
}

template <typename Fn>
RealVectorField sampled(const Grid& grid, Fn&& fn) {
  RealVectorField u(grid);
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        const auto v = fn(grid.coordinate(i1), grid.coordinate(i2), grid.coordinate(i3));
        const std::size_t m = grid.index(i1, i2, i3);
        for (int c = 0; c < 3; ++c) u.component(c)[m] = v[c];
      }
    }
  }
  return u;
}

inline std::size_t mode_index(const Grid& grid, int m1, int m2, int m3) {
  const int n = grid.n();
  auto wrap = [n](int m) { return m < 0 ? m + n : m; };
  return grid.index(wrap(m1), wrap(m2), wrap(m3));
}

}  // namespace msns::testing
