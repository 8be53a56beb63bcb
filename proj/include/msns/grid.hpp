#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace msns {

/// Periodic box [0, L)^3 sampled with n points per axis.
///
/// Flat sample and mode index is (i1 * n + i2) * n + i3, i.e. the last axis
/// is contiguous. Axis wavenumbers follow FFT ordering scaled by 2*pi/L.
class Grid {
 public:
  Grid() = default;

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  double spacing() const noexcept { return length_ / n_; }
  double cell_volume() const noexcept {
    const double h = spacing();
    return h * h * h;
  }
  double volume() const noexcept { return length_ * length_ * length_; }

  double coordinate(int i) const noexcept { return i * spacing(); }
  double wavenumber(int i) const noexcept { return wavenumbers_[i]; }
  const std::vector<double>& wavenumbers() const noexcept { return wavenumbers_; }

  /// True when axis index i survives the two-thirds truncation.
  bool keeps(int i) const noexcept { return dealias_mask_[i]; }
  const std::vector<bool>& dealias_mask() const noexcept { return dealias_mask_; }

  bool is_nyquist(int i) const noexcept { return i == n_ / 2; }

  std::size_t index(int i1, int i2, int i3) const noexcept {
    return (static_cast<std::size_t>(i1) * n_ + i2) * n_ + i3;
  }

  /// Axis index of -k for the axis index of k.
  int mirror(int i) const noexcept { return i == 0 ? 0 : n_ - i; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

  friend Grid make_grid(int n, double length);

 private:
  int n_ = 0;
  double length_ = 0.0;
  std::vector<double> wavenumbers_;
  std::vector<bool> dealias_mask_;
};

/// Throws Error(InvalidArgument) for odd n, n < 4, or non-positive L.
Grid make_grid(int n, double length = 2.0 * std::numbers::pi);

}  // namespace msns
