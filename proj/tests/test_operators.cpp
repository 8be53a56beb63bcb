#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "msns/error.hpp"
#include "msns/flows.hpp"
#include "msns/operators.hpp"
#include "msns/spectral.hpp"
#include "support.hpp"

using namespace msns;
using namespace msns::testing;

namespace {

SpectralVectorField single_mode(const Grid& g, int m1, int m2, int m3,
                                const std::array<Complex, 3>& v) {
  SpectralVectorField s(g);
  s.set(mode_index(g, m1, m2, m3), v);
  std::array<Complex, 3> w = v;
  for (auto& x : w) x = std::conj(x);
  s.set(mode_index(g, -m1, -m2, -m3), w);
  return s;
}

double max_abs_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

double max_abs(const SpectralVectorField& a) {
  double worst = 0.0;
  for (const Complex& z : a.data()) worst = std::max(worst, std::abs(z));
  return worst;
}

double max_k_dot(const SpectralVectorField& s) {
  double worst = 0.0;
  for (std::size_t m = 0; m < s.grid().size(); ++m) {
    const auto k = wavevector(s.grid(), m);
    const auto v = s.at(m);
    worst = std::max(worst, std::abs(k[0] * v[0] + k[1] * v[1] + k[2] * v[2]));
  }
  return worst;
}

}  // namespace

TEST_CASE("mollifier values") {
  CHECK(mollifier_value({0, 0, 0}, 1e-3) == 0.0);
  const double eps = 0.1;
  const double r = std::sqrt(eps * eps * eps);
  CHECK(mollifier_value({r, 0, 0}, eps) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(mollifier_value({1, 0, 0}, 1e-2) == doctest::Approx(std::exp(-1e-6)).epsilon(1e-15));
}

TEST_CASE("Leray kernel") {
  const Matrix3 p = leray_kernel({1, 0, 0});
  CHECK(p[0][0] == 0.0);
  CHECK(p[1][1] == 1.0);
  CHECK(p[2][2] == 1.0);
  CHECK(p[0][1] == 0.0);

  const Wavevector k{1, 2, 3};
  const Matrix3 q = leray_kernel(k);
  for (int i = 0; i < 3; ++i) {
    const double pk = q[i][0] * k[0] + q[i][1] * k[1] + q[i][2] * k[2];
    CHECK(std::abs(pk) < 1e-14);
  }

  const Matrix3 r = leray_kernel({2, -1, 5});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sq = 0.0;
      for (int l = 0; l < 3; ++l) sq += r[i][l] * r[l][j];
      CHECK(std::abs(sq - r[i][j]) <= 1e-14);
      CHECK(r[i][j] == r[j][i]);
    }
  }
  // Diagonal as (k_j^2 + k_l^2) / |k|^2.
  CHECK(r[0][0] == doctest::Approx((1.0 + 25.0) / 30.0));

  try {
    (void)leray_kernel({0, 0, 0});
    FAIL("expected ZeroWavenumber");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroWavenumber);
  }
}

TEST_CASE("spectral norm of symmetric matrices") {
  CHECK(std::abs(spectral_norm_symmetric(leray_kernel({1, 2, 3})) - 1.0) < 1e-15);
  CHECK(std::abs(spectral_norm_symmetric(leray_kernel({-8, 7, 3})) - 1.0) < 1e-15);
  const Matrix3 m{{{2, 1, 0}, {1, 2, 0}, {0, 0, -1}}};
  CHECK(spectral_norm_symmetric(m) == doctest::Approx(3.0));
}

TEST_CASE("apply_B") {
  const Grid g = make_grid(8);
  const PhysicalParams nu1{1.0};
  const MollifierParams mol{1e-3};
  CHECK(max_abs(apply_B(SpectralVectorField(g), 0.3, nu1, mol)) == 0.0);

  const auto s = single_mode(g, 1, 0, 0, {Complex(0), Complex(2.0, -1.0), Complex(0)});
  const SpectralVectorField b = apply_B(s, 1.0, nu1, mol);
  const Complex got = b.at(mode_index(g, 1, 0, 0))[1];
  const Complex expected = Complex(2.0, -1.0) * std::exp(-1.0) * std::exp(-1e-9);
  CHECK(std::abs(got - expected) < 1e-15);

  SpectralVectorField mean(g);
  mean.set(0, {Complex(1), Complex(1), Complex(1)});
  CHECK(max_abs(apply_B(mean, 0.0, nu1, mol)) == 0.0);
}

TEST_CASE("apply_E") {
  const Grid g = make_grid(8);
  const MollifierParams mol{1e-3};
  SpectralVectorField mean(g);
  mean.set(0, {Complex(3.0), Complex(-2.0), Complex(0.5)});
  CHECK(max_abs_diff(apply_E(mean, mol), mean) == 0.0);

  const auto s = single_mode(g, 0, 1, 0, {Complex(1.0), Complex(0), Complex(0)});
  const Complex got = apply_E(s, mol).at(mode_index(g, 0, 1, 0))[0];
  CHECK(got.real() == doctest::Approx(1e-9).epsilon(1e-6));
  CHECK(max_abs(apply_E(SpectralVectorField(g), mol)) == 0.0);
}

TEST_CASE("apply_S_frozen") {
  const Grid g = make_grid(8);
  const PhysicalParams nu1{1.0};
  const MollifierParams mol{1e-3};

  SUBCASE("hand-evaluated single mode") {
    const auto f = single_mode(g, 1, 0, 0, {Complex(0), Complex(1.0), Complex(0)});
    const SpectralVectorField s = apply_S_frozen(f, 0.1, 0.05, nu1, mol);
    const auto v = s.at(mode_index(g, 1, 0, 0));
    const double delta = std::exp(-1e-9);
    CHECK(v[1].real() == doctest::Approx(0.1 * std::exp(-0.05) * delta).epsilon(1e-14));
    CHECK(std::abs(v[0]) == 0.0);
    CHECK(std::abs(v[2]) == 0.0);

    // Cross-check: a constant history integrates to the same frozen value when
    // the frozen point is chosen where the kernel equals its mean.
    std::vector<SpectralVectorField> copies(401, f);
    std::vector<ForcingSample> history;
    for (int i = 0; i <= 400; ++i) history.push_back({0.1 * i / 400.0, copies[i]});
    const SpectralVectorField q = apply_S_quadrature(history, 0.1, nu1, mol);
    const double mean_kernel = (1.0 - std::exp(-0.1)) / 0.1;
    const double t_star = 0.1 + std::log(mean_kernel);
    const SpectralVectorField fz = apply_S_frozen(f, 0.1, t_star, nu1, mol);
    CHECK(max_abs_diff(q, fz) < 1e-8);
  }

  SUBCASE("gradients are annihilated") {
    SpectralVectorField phi_grad(g);
    for (std::size_t m = 0; m < g.size(); ++m) {
      const auto k = wavevector(g, m);
      const Complex phi(std::cos(0.3 * static_cast<double>(m)), 0.0);
      phi_grad.set(m, {Complex(0, k[0]) * phi, Complex(0, k[1]) * phi, Complex(0, k[2]) * phi});
    }
    CHECK(max_abs(apply_S_frozen(phi_grad, 0.2, std::nullopt, nu1, mol)) < 1e-14);
  }

  SUBCASE("t = 0 gives zero") {
    const SpectralVectorField f = fft_forward(white_noise(g, 4));
    CHECK(max_abs(apply_S_frozen(f, 0.0, std::nullopt, nu1, mol)) == 0.0);
  }

  SUBCASE("t_star outside [0, t]") {
    const SpectralVectorField f(g);
    CHECK_THROWS_AS(apply_S_frozen(f, 0.1, 0.2, nu1, mol), Error);
    CHECK_THROWS_AS(apply_S_frozen(f, 0.1, -0.01, nu1, mol), Error);
  }
}

TEST_CASE("apply_S_quadrature") {
  const Grid g = make_grid(8);
  const MollifierParams mol{1e-3};

  SUBCASE("analytic antiderivative for constant forcing") {
    // |k|^2 = 1, nu = 1, t = 1: nu k^2 t = 1.
    const PhysicalParams nu1{1.0};
    const auto f = single_mode(g, 1, 0, 0, {Complex(0), Complex(1.0), Complex(0)});
    const int samples = 4001;
    std::vector<ForcingSample> history;
    for (int i = 0; i < samples; ++i) history.push_back({static_cast<double>(i) / (samples - 1), f});
    const SpectralVectorField q = apply_S_quadrature(history, 1.0, nu1, mol);
    const double exact = std::exp(-1e-9) * (1.0 - std::exp(-1.0));
    CHECK(std::abs(q.at(mode_index(g, 1, 0, 0))[1].real() - exact) <= 1e-8);
  }

  SUBCASE("zero history") {
    const SpectralVectorField z(g);
    std::vector<ForcingSample> history{{0.0, z}, {0.5, z}, {1.0, z}};
    CHECK(max_abs(apply_S_quadrature(history, 1.0, PhysicalParams{0.2}, mol)) == 0.0);
  }

  SUBCASE("inviscid constant forcing is exact") {
    const SpectralVectorField f = fft_forward(white_noise(g, 11));
    std::vector<ForcingSample> history{{0.0, f}, {0.1, f}, {0.35, f}, {0.7, f}};
    const SpectralVectorField q = apply_S_quadrature(history, 0.7, PhysicalParams{0.0}, mol);
    SpectralVectorField expected(g);
    for (std::size_t m = 1; m < g.size(); ++m) {
      const auto k = wavevector(g, m);
      if (std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}) == g.n() / 2) continue;
      const Matrix3 p = leray_kernel(k);
      const double d = mollifier_value(k, mol.epsilon);
      const auto v = f.at(m);
      std::array<Complex, 3> w{};
      for (int i = 0; i < 3; ++i) {
        w[i] = 0.7 * d * (p[i][0] * v[0] + p[i][1] * v[1] + p[i][2] * v[2]);
      }
      expected.set(m, w);
    }
    CHECK(max_abs_diff(q, expected) < 1e-13 * (1.0 + max_abs(f)));
  }

  SUBCASE("bad histories") {
    const SpectralVectorField z(g);
    std::vector<ForcingSample> empty;
    CHECK_THROWS_AS(apply_S_quadrature(empty, 1.0, PhysicalParams{}, mol), Error);
    std::vector<ForcingSample> backwards{{0.0, z}, {0.6, z}, {0.4, z}, {1.0, z}};
    CHECK_THROWS_AS(apply_S_quadrature(backwards, 1.0, PhysicalParams{}, mol), Error);
    std::vector<ForcingSample> short_span{{0.0, z}, {0.5, z}};
    CHECK_THROWS_AS(apply_S_quadrature(short_span, 1.0, PhysicalParams{}, mol), Error);
  }
}

TEST_CASE("multiplier bounds hold on every mode") {
  const Grid g = make_grid(16);
  const MollifierParams mol{1e-3};
  for (double nu : {0.0, 0.1, 1.0}) {
    const PhysicalParams p{nu};
    for (double t : {0.0, 1e-2, 1.0}) {
      int violations = 0;
      for (std::size_t m = 1; m < g.size(); ++m) {
        const auto k = wavevector(g, m);
        const double b = b_multiplier(k, t, p, mol);
        const double e = e_multiplier(k, mol);
        const double s = s_multiplier_norm(k, t, 0.5 * t, p, mol);
        if (!(b >= 0.0 && b < 1.0)) ++violations;  // underflows to 0 at large nu|k|^2 t
        if (!(e > 0.0 && e <= 1.0)) ++violations;
        if (!(s >= 0.0 && s <= t)) ++violations;
      }
      CHECK(violations == 0);
      CHECK(e_multiplier({0, 0, 0}, mol) == 1.0);
      CHECK(b_multiplier({0, 0, 0}, t, p, mol) == 0.0);
      CHECK(s_multiplier_norm({0, 0, 0}, t, 0.5 * t, p, mol) == 0.0);
    }
  }
}

TEST_CASE("operator outputs: divergence, linearity, symmetry, projection") {
  const Grid g = make_grid(8, 5.0);
  const PhysicalParams p{0.3};
  const MollifierParams mol{0.2};
  const double t = 0.4;
  const SpectralVectorField f = fft_forward(white_noise(g, 21));
  const SpectralVectorField h = fft_forward(white_noise(g, 22));
  std::vector<ForcingSample> hist_f{{0.0, f}, {0.1, h}, {t, f}};
  std::vector<ForcingSample> hist_h{{0.0, h}, {0.1, f}, {t, h}};

  using Op = std::function<SpectralVectorField(const SpectralVectorField&)>;
  const std::vector<std::pair<std::string, Op>> ops = {
      {"B", [&](const SpectralVectorField& x) { return apply_B(x, t, p, mol); }},
      {"E", [&](const SpectralVectorField& x) { return apply_E(x, mol); }},
      {"S_frozen",
       [&](const SpectralVectorField& x) { return apply_S_frozen(x, t, std::nullopt, p, mol); }},
  };
  const double alpha = 1.7, beta = -0.6;
  for (const auto& [name, op] : ops) {
    CAPTURE(name);
    const SpectralVectorField lhs = op(alpha * f + beta * h);
    const SpectralVectorField rhs = alpha * op(f) + beta * op(h);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * max_abs(rhs));
    // Real input stays real: the inverse transform accepts the output.
    CHECK_NOTHROW((void)fft_inverse(op(f)));
  }

  const SpectralVectorField sf = apply_S_frozen(f, t, std::nullopt, p, mol);
  CHECK(max_k_dot(sf) <= 1e-13 * max_abs(f));
  CHECK(std::abs(sf.at(0)[0]) == 0.0);
  CHECK(max_abs_diff(apply_S_frozen(leray_project(f), t, std::nullopt, p, mol), sf) <= 1e-14);

  const SpectralVectorField sq = apply_S_quadrature(hist_f, t, p, mol);
  CHECK(max_k_dot(sq) <= 1e-13 * max_abs(f));
  std::vector<SpectralVectorField> combo;
  for (std::size_t i = 0; i < 3; ++i) {
    combo.push_back(alpha * hist_f[i].forcing.get() + beta * hist_h[i].forcing.get());
  }
  std::vector<ForcingSample> hist_combo{{0.0, combo[0]}, {0.1, combo[1]}, {t, combo[2]}};
  const SpectralVectorField lin = alpha * sq + beta * apply_S_quadrature(hist_h, t, p, mol);
  CHECK(max_abs_diff(apply_S_quadrature(hist_combo, t, p, mol), lin) <= 1e-12 * max_abs(lin));
  CHECK_NOTHROW((void)fft_inverse(sq));

  const SpectralVectorField pf = leray_project(f), ph = leray_project(h);
  std::vector<ForcingSample> hist_p{{0.0, pf}, {0.1, ph}, {t, pf}};
  CHECK(max_abs_diff(apply_S_quadrature(hist_p, t, p, mol), sq) <= 1e-14);
}

TEST_CASE("probe fields sit on one shell") {
  const Grid g = make_grid(16);
  const RealVectorField f = probe_field(g, 3, ProbeBand{2, false, 1e-3});
  const SpectralVectorField s = fft_forward(f);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const auto k = wavevector(g, m);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (std::abs(k2 - 2.0) > 1e-12) {
      CHECK(std::abs(s.at(m)[0]) + std::abs(s.at(m)[1]) + std::abs(s.at(m)[2]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(probe_field(g, 3, ProbeBand{7, false, 1e-3}), Error);
}

TEST_CASE("probe_operator_norm") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-3};

  const MultiplierReport b = probe_operator_norm(OperatorId::B, 1, 10, g, p, mol, 0.0);
  CHECK(b.samples == 10);
  CHECK(b.max_ratio <= 1.0 + 1e-12);
  CHECK(b.min_ratio > 0.0);

  const MultiplierReport e = probe_operator_norm(OperatorId::E, 1, 10, g, p, mol, 0.0);
  CHECK(e.max_ratio <= -std::expm1(-1e-9) + 1e-12);
  CHECK(e.max_multiplier == doctest::Approx(-std::expm1(-1e-9)));
  CHECK(e.claimed_bound == mol.epsilon);
  CHECK(e.claim_holds);

  const MultiplierReport em =
      probe_operator_norm(OperatorId::E, 1, 10, g, p, mol, 0.0, ProbeBand{1, true, 1e-3});
  CHECK(em.max_ratio == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_FALSE(em.claim_holds);

  const MultiplierReport s = probe_operator_norm(OperatorId::S, 1, 10, g, p, mol, 1e-2);
  CHECK(s.max_ratio >= 0.0);
  CHECK(std::isfinite(s.max_ratio));

  const std::string json = to_json(em);
  CHECK(json.find("\"operator\"") != std::string::npos);
}

TEST_CASE("initial split gap is at rounding level") {
  const Grid g = make_grid(16);
  const RealVectorField u = taylor_green(g);
  CHECK(initial_split_gap(u, MollifierParams{1e-3}) < 1e-13);
  CHECK(initial_split_gap(u, MollifierParams{0.5}) < 1e-13);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MollifierParams{0.0}.validate(), Error);
  CHECK_THROWS_AS(MollifierParams{1.0}.validate(), Error);
  CHECK_THROWS_AS(PhysicalParams{-1.0}.validate(), Error);
  CHECK_THROWS_AS(PhysicalParams{INFINITY}.validate(), Error);
  CHECK_NOTHROW(PhysicalParams{0.0}.validate());
}
