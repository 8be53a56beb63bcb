#include "msns/grid.hpp"

#include <cmath>
#include <string>

#include "msns/error.hpp"

namespace msns {

Grid make_grid(int n, double length) {
  if (n < 4 || n % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "grid.n must be an even integer >= 4, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::InvalidArgument, "grid.L must be positive and finite");
  }
  Grid grid;
  grid.n_ = n;
  grid.length_ = length;
  grid.wavenumbers_.resize(n);
  grid.dealias_mask_.resize(n);
  const double scale = 2.0 * std::numbers::pi / length;
  for (int i = 0; i < n; ++i) {
    const int m = i < n / 2 ? i : i - n;
    grid.wavenumbers_[i] = scale * m;
    // |k| <= (2/3)(n/2)(2pi/L)  <=>  3|m| <= n
    grid.dealias_mask_[i] = 3 * std::abs(m) <= n;
  }
  return grid;
}

}  // namespace msns
