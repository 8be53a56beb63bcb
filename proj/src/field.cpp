#include "msns/field.hpp"

#include <algorithm>
#include <cmath>

#include "msns/error.hpp"

namespace msns {
namespace detail {
namespace {

constexpr std::align_val_t kAlignment{64};
// Only blocks at least this large are cached; small ones go straight back.
constexpr std::size_t kCacheMinBytes = 64 * 1024;
constexpr std::size_t kCacheSlots = 32;

struct BlockCache {
  std::vector<std::pair<std::size_t, void*>> blocks;
  ~BlockCache() {
    for (auto& [bytes, ptr] : blocks) ::operator delete(ptr, kAlignment);
  }
};

BlockCache& block_cache() {
  thread_local BlockCache cache;
  return cache;
}

}  // namespace

void* aligned_acquire(std::size_t bytes) {
  if (bytes >= kCacheMinBytes) {
    auto& blocks = block_cache().blocks;
    for (std::size_t i = blocks.size(); i-- > 0;) {
      if (blocks[i].first == bytes) {
        void* ptr = blocks[i].second;
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
        return ptr;
      }
    }
  }
  return ::operator new(bytes, kAlignment);
}

void aligned_release(void* ptr, std::size_t bytes) noexcept {
  if (ptr == nullptr) return;
  if (bytes >= kCacheMinBytes) {
    auto& blocks = block_cache().blocks;
    if (blocks.size() < kCacheSlots) {
      try {
        blocks.emplace_back(bytes, ptr);
        return;
      } catch (...) {
      }
    }
  }
  ::operator delete(ptr, kAlignment);
}

}  // namespace detail

namespace {

template <typename Field>
void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorKind::InvalidArgument, "fields live on different grids");
  }
}

}  // namespace

RealVectorField& RealVectorField::operator+=(const RealVectorField& other) {
  require_same_grid(*this, other);
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::plus<>{});
  return *this;
}

RealVectorField& RealVectorField::operator-=(const RealVectorField& other) {
  require_same_grid(*this, other);
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::minus<>{});
  return *this;
}

RealVectorField& RealVectorField::operator*=(double factor) {
  for (double& v : data_) v *= factor;
  return *this;
}

bool RealVectorField::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

RealVectorField operator+(RealVectorField a, const RealVectorField& b) { return a += b; }
RealVectorField operator-(RealVectorField a, const RealVectorField& b) { return a -= b; }
RealVectorField operator*(double factor, RealVectorField a) { return a *= factor; }

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& other) {
  require_same_grid(*this, other);
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::plus<>{});
  return *this;
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& other) {
  require_same_grid(*this, other);
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(),
                 std::minus<>{});
  return *this;
}

SpectralVectorField& SpectralVectorField::operator*=(double factor) {
  for (Complex& v : data_) v *= factor;
  return *this;
}

bool SpectralVectorField::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
  return a += b;
}
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
  return a -= b;
}
SpectralVectorField operator*(double factor, SpectralVectorField a) { return a *= factor; }

std::array<double, 3> wavevector(const Grid& grid, std::size_t mode) noexcept {
  const auto n = static_cast<std::size_t>(grid.n());
  const int i3 = static_cast<int>(mode % n);
  const int i2 = static_cast<int>((mode / n) % n);
  const int i1 = static_cast<int>(mode / (n * n));
  return {grid.wavenumber(i1), grid.wavenumber(i2), grid.wavenumber(i3)};
}

}  // namespace msns
