#include "msns/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "modes.hpp"
#include "msns/error.hpp"
#include "msns/random.hpp"
#include "msns/spectral.hpp"

namespace msns {

using detail::for_each_interior_mode;
using detail::for_each_mode;
using detail::norm2;

void MollifierParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mollifier.epsilon must lie in (0, 1)");
  }
}

void PhysicalParams::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorKind::InvalidArgument, "physics.nu must be finite and >= 0");
  }
}

double mollifier_value(const Wavevector& k, double epsilon) noexcept {
  const double k2 = norm2(k);
  if (k2 == 0.0) return 0.0;
  return std::exp(-epsilon * epsilon * epsilon / k2);
}

Matrix3 leray_kernel(const Wavevector& k) {
  const double k2 = norm2(k);
  if (k2 == 0.0) {
    throw Error(ErrorKind::ZeroWavenumber, "Leray kernel is undefined at k = 0");
  }
  Matrix3 p{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      p[i][j] = (i == j ? 1.0 : 0.0) - k[i] * k[j] / k2;
    }
  }
  return p;
}

double spectral_norm_symmetric(const Matrix3& a) noexcept {
  // Cyclic Jacobi rotations; the closed trigonometric form loses about
  // sqrt(eps) near repeated eigenvalues, which the projector always has.
  Matrix3 m = a;
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    const double diag = m[0][0] * m[0][0] + m[1][1] * m[1][1] + m[2][2] * m[2][2];
    if (off <= 1e-36 * diag || off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0.0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < 3; ++r) {
          const double mrp = m[r][p], mrq = m[r][q];
          m[r][p] = c * mrp - s * mrq;
          m[r][q] = s * mrp + c * mrq;
        }
        for (int r = 0; r < 3; ++r) {
          const double mpr = m[p][r], mqr = m[q][r];
          m[p][r] = c * mpr - s * mqr;
          m[q][r] = s * mpr + c * mqr;
        }
      }
    }
  }
  return std::max({std::abs(m[0][0]), std::abs(m[1][1]), std::abs(m[2][2])});
}

double b_multiplier(const Wavevector& k, double t, const PhysicalParams& params,
                    const MollifierParams& mollifier) noexcept {
  return std::exp(-params.nu * norm2(k) * t) * mollifier_value(k, mollifier.epsilon);
}

double e_multiplier(const Wavevector& k, const MollifierParams& mollifier) noexcept {
  const double k2 = norm2(k);
  if (k2 == 0.0) return 1.0;
  const double e = mollifier.epsilon;
  return -std::expm1(-e * e * e / k2);
}

namespace {

void check_times(double t, double t_star) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidArgument, "time must be finite and >= 0");
  }
  if (!(t_star >= 0.0 && t_star <= t)) {
    throw Error(ErrorKind::InvalidArgument, "t_star must satisfy 0 <= t_star <= t");
  }
}

// y = P(k) x for complex x, with k != 0.
std::array<Complex, 3> project(const Wavevector& k, double k2,
                               const std::array<Complex, 3>& x) noexcept {
  const Complex kx = (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) / k2;
  return {x[0] - k[0] * kx, x[1] - k[1] * kx, x[2] - k[2] * kx};
}

}  // namespace

double s_kernel_multiplier_norm(const Wavevector& k, double t, double t_star,
                                const PhysicalParams& params,
                                const MollifierParams& mollifier) {
  check_times(t, t_star);
  if (norm2(k) == 0.0) return 0.0;
  return std::exp(-params.nu * norm2(k) * (t - t_star)) *
         mollifier_value(k, mollifier.epsilon) * spectral_norm_symmetric(leray_kernel(k));
}

double s_multiplier_norm(const Wavevector& k, double t, double t_star,
                         const PhysicalParams& params, const MollifierParams& mollifier) {
  return t * s_kernel_multiplier_norm(k, t, t_star, params, mollifier);
}

SpectralVectorField apply_B(const SpectralVectorField& initial, double t,
                            const PhysicalParams& params, const MollifierParams& mollifier) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "B requires t >= 0");
  SpectralVectorField out(initial.grid());
  for_each_mode(initial.grid(), [&](std::size_t m, const Wavevector& k) {
    const double a = b_multiplier(k, t, params, mollifier);
    for (int c = 0; c < 3; ++c) out.component(c)[m] = a * initial.component(c)[m];
  });
  return out;
}

SpectralVectorField apply_E(const SpectralVectorField& velocity,
                            const MollifierParams& mollifier) {
  SpectralVectorField out(velocity.grid());
  for_each_mode(velocity.grid(), [&](std::size_t m, const Wavevector& k) {
    const double a = e_multiplier(k, mollifier);
    for (int c = 0; c < 3; ++c) out.component(c)[m] = a * velocity.component(c)[m];
  });
  return out;
}

SpectralVectorField apply_S_kernel(const SpectralVectorField& forcing, double t,
                                   std::optional<double> t_star,
                                   const PhysicalParams& params,
                                   const MollifierParams& mollifier) {
  const double ts = t_star.value_or(0.5 * t);
  check_times(t, ts);
  SpectralVectorField out(forcing.grid());
  for_each_interior_mode(forcing.grid(), [&](std::size_t m, const Wavevector& k) {
    const double k2 = norm2(k);
    if (k2 == 0.0) return;
    const double a = std::exp(-params.nu * k2 * (t - ts)) *
                     std::exp(-mollifier.epsilon * mollifier.epsilon * mollifier.epsilon / k2);
    auto y = project(k, k2, forcing.at(m));
    for (auto& v : y) v *= a;
    out.set(m, y);
  });
  return out;
}

SpectralVectorField apply_S_frozen(const SpectralVectorField& forcing, double t,
                                   std::optional<double> t_star,
                                   const PhysicalParams& params,
                                   const MollifierParams& mollifier) {
  SpectralVectorField out = apply_S_kernel(forcing, t, t_star, params, mollifier);
  out *= t;
  return out;
}

SpectralVectorField apply_S_quadrature(std::span<const ForcingSample> history, double t,
                                       const PhysicalParams& params,
                                       const MollifierParams& mollifier) {
  if (history.empty()) {
    throw Error(ErrorKind::InvalidArgument, "S quadrature needs a nonempty history");
  }
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (!(history[i].tau > history[i - 1].tau)) {
      throw Error(ErrorKind::InvalidArgument,
                  "S quadrature history timestamps must be strictly increasing");
    }
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (std::abs(history.front().tau) > slack || std::abs(history.back().tau - t) > slack) {
    throw Error(ErrorKind::InvalidArgument, "S quadrature history must span [0, t]");
  }
  const Grid& grid = history.front().forcing.get().grid();
  const std::size_t count = history.size();
  std::vector<double> weights(count, 0.0);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double h = history[i + 1].tau - history[i].tau;
    weights[i] += 0.5 * h;
    weights[i + 1] += 0.5 * h;
  }
  const double eps3 = mollifier.epsilon * mollifier.epsilon * mollifier.epsilon;
  SpectralVectorField out(grid);
  for_each_interior_mode(grid, [&](std::size_t m, const Wavevector& k) {
    const double k2 = norm2(k);
    if (k2 == 0.0) return;
    std::array<Complex, 3> sum{};
    for (std::size_t i = 0; i < count; ++i) {
      const double w = weights[i] * std::exp(-params.nu * k2 * (t - history[i].tau));
      const auto f = history[i].forcing.get().at(m);
      for (int c = 0; c < 3; ++c) sum[c] += w * f[c];
    }
    auto y = project(k, k2, sum);
    const double delta = std::exp(-eps3 / k2);
    for (auto& v : y) v *= delta;
    out.set(m, y);
  });
  return out;
}

SpectralVectorField leray_project(const SpectralVectorField& spectrum) {
  SpectralVectorField out(spectrum.grid());
  for_each_interior_mode(spectrum.grid(), [&](std::size_t m, const Wavevector& k) {
    const double k2 = norm2(k);
    if (k2 == 0.0) return;
    out.set(m, project(k, k2, spectrum.at(m)));
  });
  return out;
}

const char* to_string(OperatorId id) noexcept {
  switch (id) {
    case OperatorId::B: return "B";
    case OperatorId::E: return "E";
    case OperatorId::S: return "S";
  }
  return "?";
}

RealVectorField probe_field(const Grid& grid, std::uint64_t seed, const ProbeBand& band) {
  const int n = grid.n();
  RandomStream rng(seed);
  SpectralVectorField spectrum(grid);
  bool any = false;
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        if (grid.is_nyquist(i1) || grid.is_nyquist(i2) || grid.is_nyquist(i3)) continue;
        const int m1 = i1 < n / 2 ? i1 : i1 - n;
        const int m2 = i2 < n / 2 ? i2 : i2 - n;
        const int m3 = i3 < n / 2 ? i3 : i3 - n;
        if (m1 * m1 + m2 * m2 + m3 * m3 != band.shell) continue;
        const std::size_t mode = grid.index(i1, i2, i3);
        const std::size_t partner =
            grid.index(grid.mirror(i1), grid.mirror(i2), grid.mirror(i3));
        if (partner < mode) continue;  // drawn together with its partner
        std::array<Complex, 3> v{};
        for (auto& x : v) x = Complex(rng.normal(), rng.normal());
        spectrum.set(mode, v);
        for (auto& x : v) x = std::conj(x);
        spectrum.set(partner, v);
        any = true;
      }
    }
  }
  if (!any) {
    throw Error(ErrorKind::InvalidArgument,
                "probe shell |m|^2 = " + std::to_string(band.shell) + " holds no modes");
  }
  RealVectorField field = fft_inverse(spectrum);
  field *= 1.0 / sup_norm(field);
  if (band.include_mean) {
    field *= band.oscillation;
    for (int c = 0; c < 3; ++c) {
      for (double& v : field.component(c)) v += 1.0;
    }
  }
  return field;
}

MultiplierReport probe_operator_norm(OperatorId op, std::uint64_t seed, int count,
                                     const Grid& grid, const PhysicalParams& params,
                                     const MollifierParams& mollifier, double t,
                                     const ProbeBand& band) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "probe count must be >= 1");
  params.validate();
  mollifier.validate();

  MultiplierReport report;
  report.op = op;
  report.shell = band.shell;
  report.include_mean = band.include_mean;
  report.t = t;
  report.epsilon = mollifier.epsilon;
  report.samples = count;
  report.claimed_bound = op == OperatorId::E ? mollifier.epsilon : 1.0;
  report.min_ratio = std::numeric_limits<double>::infinity();

  double ratio_sum = 0.0;
  for (int s = 0; s < count; ++s) {
    const RealVectorField f = probe_field(grid, seed + static_cast<std::uint64_t>(s), band);
    const SpectralVectorField fhat = fft_forward(f);
    SpectralVectorField out;
    switch (op) {
      case OperatorId::B: out = apply_B(fhat, t, params, mollifier); break;
      case OperatorId::E: out = apply_E(fhat, mollifier); break;
      case OperatorId::S: out = apply_S_kernel(fhat, t, std::nullopt, params, mollifier); break;
    }
    if (s == 0) {
      // Every sample shares the same support.
      const double cutoff = 1e-14 * sup_norm(f);
      for_each_mode(grid, [&](std::size_t m, const Wavevector& k) {
        const auto v = fhat.at(m);
        if (std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]) <= cutoff) return;
        double a = 0.0;
        switch (op) {
          case OperatorId::B: a = b_multiplier(k, t, params, mollifier); break;
          case OperatorId::E: a = e_multiplier(k, mollifier); break;
          case OperatorId::S:
            a = s_kernel_multiplier_norm(k, t, 0.5 * t, params, mollifier);
            break;
        }
        report.max_multiplier = std::max(report.max_multiplier, a);
      });
    }
    const double ratio = sup_norm(fft_inverse(out)) / sup_norm(f);
    report.max_ratio = std::max(report.max_ratio, ratio);
    report.min_ratio = std::min(report.min_ratio, ratio);
    ratio_sum += ratio;
  }
  report.mean_ratio = ratio_sum / count;
  report.claim_holds = report.max_ratio < report.claimed_bound;
  return report;
}

double initial_split_gap(const RealVectorField& u, const MollifierParams& mollifier) {
  const SpectralVectorField uhat = fft_forward(u);
  SpectralVectorField sum = apply_B(uhat, 0.0, PhysicalParams{}, mollifier);
  sum += apply_E(uhat, mollifier);
  return sup_norm(fft_inverse(sum) - u);
}

std::string to_json(const MultiplierReport& r) {
  nlohmann::ordered_json j;
  j["operator"] = to_string(r.op);
  j["shell"] = r.shell;
  j["include_mean"] = r.include_mean;
  j["t"] = r.t;
  j["epsilon"] = r.epsilon;
  j["samples"] = r.samples;
  j["max_multiplier"] = r.max_multiplier;
  j["max_ratio"] = r.max_ratio;
  j["min_ratio"] = r.min_ratio;
  j["mean_ratio"] = r.mean_ratio;
  j["claimed_bound"] = r.claimed_bound;
  j["claim_holds"] = r.claim_holds;
  return j.dump();
}

}  // namespace msns
