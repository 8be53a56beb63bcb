#include "msns/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "msns/error.hpp"

namespace msns {
namespace {

// FFTW's planner is not thread-safe but fftw_execute_dft on an existing plan
// is, so plans are created once under a lock and shared afterwards.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int howmany, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, howmany, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>(n) * n * n * howmany;
    AlignedVector<Complex> in(total), out(total);
    const int dims[3] = {n, n, n};
    const int dist = n * n * n;
    // ESTIMATE keeps the algorithm choice independent of timing noise, which
    // keeps repeated runs bitwise identical.
    fftw_plan plan = fftw_plan_many_dft(
        3, dims, howmany, reinterpret_cast<fftw_complex*>(in.data()), nullptr, 1, dist,
        reinterpret_cast<fftw_complex*>(out.data()), nullptr, 1, dist, sign, FFTW_ESTIMATE);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// Both buffers must come from AlignedVector: plans are made for aligned data.
void execute(int n, int howmany, int sign, const Complex* in, Complex* out) {
  fftw_plan plan = PlanCache::instance().get(n, howmany, sign);
  // The plan is out-of-place and never writes to its input.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

constexpr int kForwardSign = FFTW_BACKWARD;  // e^{+i k.x}
constexpr int kInverseSign = FFTW_FORWARD;   // e^{-i k.x}

void check_hermitian(std::span<const Complex> values) {
  double max_abs2 = 0.0;
  double max_imag2 = 0.0;
  for (const Complex& z : values) {
    max_abs2 = std::max(max_abs2, std::norm(z));
    max_imag2 = std::max(max_imag2, z.imag() * z.imag());
  }
  if (max_imag2 > kHermitianTolerance * kHermitianTolerance * max_abs2) {
    const double max_imag = std::sqrt(max_imag2);
    const double max_abs = std::sqrt(max_abs2);
    std::ostringstream msg;
    msg << "inverse transform has imaginary residue " << max_imag
        << " against magnitude " << max_abs;
    throw Error(ErrorKind::NonHermitianInput, msg.str());
  }
}

// Per-thread transform buffer, reused across calls so large transforms do not
// fault in fresh pages every time.
AlignedVector<Complex>& scratch(std::size_t size) {
  thread_local AlignedVector<Complex> buffer;
  if (buffer.size() != size) buffer.resize(size);
  return buffer;
}

}  // namespace

SpectralVectorField fft_forward(const RealVectorField& field) {
  const Grid& grid = field.grid();
  AlignedVector<Complex>& in = scratch(field.data().size());
  std::copy(field.data().begin(), field.data().end(), in.begin());
  SpectralVectorField out(grid);
  execute(grid.n(), 3, kForwardSign, in.data(), out.data().data());
  out *= 1.0 / static_cast<double>(grid.size());
  return out;
}

RealVectorField fft_inverse(const SpectralVectorField& spectrum) {
  const Grid& grid = spectrum.grid();
  AlignedVector<Complex>& out = scratch(spectrum.data().size());
  execute(grid.n(), 3, kInverseSign, spectrum.data().data(), out.data());
  check_hermitian(out);
  RealVectorField field(grid);
  std::transform(out.begin(), out.end(), field.data().begin(),
                 [](const Complex& z) { return z.real(); });
  return field;
}

std::vector<Complex> fft_forward_scalar(const Grid& grid, std::span<const double> samples) {
  AlignedVector<Complex> in(samples.begin(), samples.end());
  AlignedVector<Complex> out(in.size());
  execute(grid.n(), 1, kForwardSign, in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(grid.size());
  std::vector<Complex> coeffs(out.size());
  std::transform(out.begin(), out.end(), coeffs.begin(),
                 [scale](const Complex& z) { return z * scale; });
  return coeffs;
}

std::vector<double> fft_inverse_scalar(const Grid& grid, std::span<const Complex> coeffs) {
  AlignedVector<Complex> in(coeffs.begin(), coeffs.end());
  AlignedVector<Complex> out(coeffs.size());
  execute(grid.n(), 1, kInverseSign, in.data(), out.data());
  check_hermitian(out);
  std::vector<double> samples(out.size());
  std::transform(out.begin(), out.end(), samples.begin(),
                 [](const Complex& z) { return z.real(); });
  return samples;
}

SpectralVectorField spectral_derivative(const SpectralVectorField& spectrum, int axis) {
  if (axis < 1 || axis > 3) {
    throw Error(ErrorKind::InvalidArgument, "derivative axis must be 1, 2 or 3");
  }
  const Grid& grid = spectrum.grid();
  const int n = grid.n();
  // Multiplier -i k per axis index; the Nyquist wavenumber has no odd partner.
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = grid.is_nyquist(i) ? 0.0 : grid.wavenumber(i);
  SpectralVectorField out(grid);
  for (int c = 0; c < 3; ++c) {
    const Complex* src = spectrum.component(c).data();
    Complex* dst = out.component(c).data();
    std::size_t m = 0;
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        for (int i3 = 0; i3 < n; ++i3, ++m) {
          const double km = axis == 1 ? k[i1] : axis == 2 ? k[i2] : k[i3];
          // (-i k) (a + i b) = k b - i k a
          dst[m] = Complex(km * src[m].imag(), -km * src[m].real());
        }
      }
    }
  }
  return out;
}

bool survives_dealias(const Grid& grid, std::size_t mode) noexcept {
  const auto n = static_cast<std::size_t>(grid.n());
  return grid.keeps(static_cast<int>(mode % n)) &&
         grid.keeps(static_cast<int>((mode / n) % n)) &&
         grid.keeps(static_cast<int>(mode / (n * n)));
}

SpectralVectorField dealias(const SpectralVectorField& spectrum) {
  SpectralVectorField out = spectrum;
  const Grid& grid = spectrum.grid();
  const int n = grid.n();
  for (int c = 0; c < 3; ++c) {
    Complex* dst = out.component(c).data();
    std::size_t m = 0;
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        const bool row = grid.keeps(i1) && grid.keeps(i2);
        for (int i3 = 0; i3 < n; ++i3, ++m) {
          if (!row || !grid.keeps(i3)) dst[m] = 0.0;
        }
      }
    }
  }
  return out;
}

double sup_norm(const RealVectorField& field) noexcept {
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    double peak = 0.0;
    for (double v : field.component(c)) peak = std::max(peak, std::abs(v));
    total += peak;
  }
  return total;
}

double l2_norm(const RealVectorField& field) noexcept {
  double sum = 0.0;
  for (double v : field.data()) sum += v * v;
  return std::sqrt(sum * field.grid().cell_volume());
}

double parseval_energy(const SpectralVectorField& spectrum) noexcept {
  double sum = 0.0;
  for (const Complex& z : spectrum.data()) sum += std::norm(z);
  return sum * spectrum.grid().volume();
}

}  // namespace msns
