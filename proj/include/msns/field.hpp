#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include "msns/grid.hpp"

namespace msns {

using Complex = std::complex<double>;

namespace detail {
// Aligned blocks; a small per-thread cache recycles freed blocks so that
// large field buffers are not returned to the system and faulted back in.
void* aligned_acquire(std::size_t bytes);
void aligned_release(void* ptr, std::size_t bytes) noexcept;
}  // namespace detail

/// 64-byte aligned storage so FFT plans can use their SIMD kernels.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    return static_cast<T*>(detail::aligned_acquire(count * sizeof(T)));
  }
  void deallocate(T* ptr, std::size_t count) noexcept {
    detail::aligned_release(ptr, count * sizeof(T));
  }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Three real components sampled on a grid, stored component-major.
class RealVectorField {
 public:
  RealVectorField() = default;
  explicit RealVectorField(Grid grid)
      : grid_(std::move(grid)), data_(3 * grid_.size(), 0.0) {}

  const Grid& grid() const noexcept { return grid_; }

  std::span<double> component(int c) noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const double> component(int c) const noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  RealVectorField& operator+=(const RealVectorField& other);
  RealVectorField& operator-=(const RealVectorField& other);
  RealVectorField& operator*=(double factor);

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  AlignedVector<double> data_;
};

RealVectorField operator+(RealVectorField a, const RealVectorField& b);
RealVectorField operator-(RealVectorField a, const RealVectorField& b);
RealVectorField operator*(double factor, RealVectorField a);

/// Fourier coefficients of a vector field on the full n^3 mode lattice.
class SpectralVectorField {
 public:
  SpectralVectorField() = default;
  explicit SpectralVectorField(Grid grid)
      : grid_(std::move(grid)), data_(3 * grid_.size(), Complex{}) {}

  const Grid& grid() const noexcept { return grid_; }

  std::span<Complex> component(int c) noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const Complex> component(int c) const noexcept {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  std::array<Complex, 3> at(std::size_t mode) const noexcept {
    const std::size_t m = grid_.size();
    return {data_[mode], data_[m + mode], data_[2 * m + mode]};
  }
  void set(std::size_t mode, const std::array<Complex, 3>& v) noexcept {
    const std::size_t m = grid_.size();
    data_[mode] = v[0];
    data_[m + mode] = v[1];
    data_[2 * m + mode] = v[2];
  }

  SpectralVectorField& operator+=(const SpectralVectorField& other);
  SpectralVectorField& operator-=(const SpectralVectorField& other);
  SpectralVectorField& operator*=(double factor);

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  AlignedVector<Complex> data_;
};

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator*(double factor, SpectralVectorField a);

/// Wavenumber triple of a flat mode index.
std::array<double, 3> wavevector(const Grid& grid, std::size_t mode) noexcept;

}  // namespace msns
