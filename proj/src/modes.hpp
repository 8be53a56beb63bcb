#pragma once

#include "msns/grid.hpp"
#include "msns/operators.hpp"

namespace msns::detail {

/// Calls fn(mode, wavevector) for every lattice mode in storage order.
template <typename Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    const double k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const double k2 = grid.wavenumber(i2);
      for (int i3 = 0; i3 < n; ++i3) {
        fn(grid.index(i1, i2, i3), Wavevector{k1, k2, grid.wavenumber(i3)});
      }
    }
  }
}

/// Like for_each_mode but skips modes with a Nyquist index on any axis. The
/// Nyquist wavenumber is its own mirror, so a k-dependent projection there
/// would break conjugate symmetry; projected outputs leave those modes zero.
template <typename Fn>
void for_each_interior_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    if (grid.is_nyquist(i1)) continue;
    const double k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      if (grid.is_nyquist(i2)) continue;
      const double k2 = grid.wavenumber(i2);
      for (int i3 = 0; i3 < n; ++i3) {
        if (grid.is_nyquist(i3)) continue;
        fn(grid.index(i1, i2, i3), Wavevector{k1, k2, grid.wavenumber(i3)});
      }
    }
  }
}

inline double norm2(const Wavevector& k) noexcept {
  return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
}

}  // namespace msns::detail
