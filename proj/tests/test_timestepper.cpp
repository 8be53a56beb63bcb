#include <cmath>
#include <string>

#include "doctest.h"
#include "msns/error.hpp"
#include "msns/flows.hpp"
#include "msns/nonlinear.hpp"
#include "msns/spectral.hpp"
#include "msns/timestepper.hpp"
#include "support.hpp"

using namespace msns;
using namespace msns::testing;

namespace {

bool bitwise_equal(const RealVectorField& a, const RealVectorField& b) {
  return std::equal(a.data().begin(), a.data().end(), b.data().begin(), b.data().end());
}

RealVectorField smooth_random(const Grid& g, std::uint64_t seed, double amplitude = 1.0) {
  return fft_inverse(dealias(fft_forward(random_schwartz_field(g, seed, 2.0, amplitude))));
}

}  // namespace

TEST_CASE("window config validation") {
  WindowConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.delta_t = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.delta_t = 0.5 * kMinWindowLength;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = WindowConfig{};
  cfg.picard_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = WindowConfig{};
  cfg.picard_max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = WindowConfig{};
  cfg.substeps = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);

  CHECK(window_mode_from_string("paper_literal") == WindowMode::PaperLiteral);
  CHECK(window_mode_from_string("mode_solved") == WindowMode::ModeSolved);
  CHECK_THROWS_AS(window_mode_from_string("implicit"), Error);
}

TEST_CASE("window count") {
  CHECK(window_count(1.0, 1e-2) == 100);
  CHECK(window_count(0.5, 1e-2) == 50);
  CHECK(window_count(0.015, 1e-2) == 2);
  CHECK(window_count(1e-2, 1e-2) == 1);
  CHECK(window_count(0.3, 0.1) == 3);
}

TEST_CASE("picard window on zero data") {
  const Grid g = make_grid(8);
  const WindowResult r = picard_window(RealVectorField(g), WindowConfig{}, PhysicalParams{0.1},
                                       MollifierParams{});
  CHECK(sup_norm(r.u_end) == 0.0);
  CHECK(r.trace.iterations() == 1);
  CHECK(r.trace.converged);
}

TEST_CASE("picard window against exact decay") {
  const Grid g = make_grid(32);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-3};
  WindowConfig cfg;
  cfg.delta_t = 1e-2;

  SUBCASE("ABC") {
    const RealVectorField u0 = abc_flow(g, 1, 1, 1);
    const WindowResult r = picard_window(u0, cfg, p, mol);
    CHECK(r.trace.converged);
    CHECK(r.trace.final_residual() <= cfg.picard_tol);
    CHECK(sup_norm(r.u_end - exact_decay_solution(FlowKind::Abc, u0, 1e-2, 0.1)) <= 1e-4);
  }
  SUBCASE("Taylor-Green") {
    const RealVectorField u0 = taylor_green(g);
    const WindowResult r = picard_window(u0, cfg, p, mol);
    CHECK(r.trace.converged);
    CHECK(sup_norm(r.u_end - exact_decay_solution(FlowKind::TaylorGreen, u0, 1e-2, 0.1)) <=
          1e-4);
    CHECK(max_abs_divergence(r.u_end) <= 1e-8);
    CHECK(std::isfinite(r.trace.contraction_ratio));
  }
}

TEST_CASE("literal and mode-solved windows agree on zero-mean data") {
  const Grid g = make_grid(16);
  const RealVectorField u0 = smooth_random(g, 5);
  WindowConfig cfg;
  const WindowResult solved = picard_window(u0, cfg, PhysicalParams{0.1}, MollifierParams{});
  cfg.mode = WindowMode::PaperLiteral;
  const WindowResult literal = picard_window(u0, cfg, PhysicalParams{0.1}, MollifierParams{});
  CHECK(literal.trace.converged);
  CHECK(sup_norm(literal.u_end - solved.u_end) <= 1e-8);
}

TEST_CASE("picard window is deterministic and rejects divergent data") {
  const Grid g = make_grid(16);
  const RealVectorField u0 = smooth_random(g, 9);
  const WindowResult a = picard_window(u0, WindowConfig{}, PhysicalParams{0.05}, MollifierParams{});
  const WindowResult b = picard_window(u0, WindowConfig{}, PhysicalParams{0.05}, MollifierParams{});
  CHECK(bitwise_equal(a.u_end, b.u_end));
  CHECK(a.trace.residuals == b.trace.residuals);

  const auto bad = sampled(g, [](double x1, double, double) {
    return std::array<double, 3>{std::sin(x1), 0.0, 0.0};
  });
  CHECK_THROWS_AS(picard_window(bad, WindowConfig{}, PhysicalParams{}, MollifierParams{}), Error);
}

TEST_CASE("march") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-4};
  WindowConfig cfg;
  const RealVectorField u0 = taylor_green(g);

  SUBCASE("one window equals picard_window") {
    const Trajectory traj = march(u0, cfg.delta_t, cfg, p, mol);
    const WindowResult w = picard_window(u0, cfg, p, mol);
    REQUIRE(traj.records.size() == 1);
    CHECK(bitwise_equal(traj.final_state, w.u_end));
    CHECK(traj.traces[0].residuals == w.trace.residuals);
  }

  SUBCASE("diagnostic times and invariants") {
    MarchOptions opts;
    opts.keep_states = true;
    std::vector<std::size_t> seen;
    opts.on_window = [&](std::size_t k, double, const RealVectorField&) { seen.push_back(k); };
    const Trajectory traj = march(u0, 0.1, cfg, p, mol, opts);
    REQUIRE(traj.records.size() == 10);
    CHECK(traj.initial.t == 0.0);
    for (std::size_t k = 0; k < 10; ++k) {
      CHECK(traj.records[k].t == doctest::Approx((k + 1) * cfg.delta_t).epsilon(1e-14));
      CHECK(traj.records[k].max_divergence <= 1e-8);
      CHECK(max_abs_divergence(traj.states[k]) <= 1e-8);
      CHECK(seen[k] == k);
    }
    const RealVectorField exact = exact_decay_solution(FlowKind::TaylorGreen, u0, 0.1, 0.1);
    CHECK(sup_norm(traj.final_state - exact) <= 1e-4);
    CHECK(apriori_monitor(traj).sup_monotone());
    CHECK(apriori_monitor(traj).l2_monotone());
  }

  SUBCASE("non-convergence names the window") {
    WindowConfig tight = cfg;
    tight.picard_max_iters = 1;
    try {
      (void)march(u0, 0.05, tight, p, mol);
      FAIL("expected NonConvergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonConvergence);
      CHECK(std::string(e.what()).find("window 0") != std::string::npos);
      CHECK(std::string(e.what()).find("contraction") != std::string::npos);
    }
  }
}

TEST_CASE("approx_step") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-3};
  const RealVectorField u0 = smooth_random(g, 3);

  const SpectralVectorField u0hat = fft_forward(u0);
  const RealVectorField split =
      fft_inverse(apply_E(u0hat, mol) + apply_B(u0hat, 0.0, p, mol));
  CHECK(sup_norm(approx_step(u0, 0.0, p, mol) - split) <= 1e-15);
  CHECK(sup_norm(approx_step(RealVectorField(g), 0.01, p, mol)) == 0.0);

  const Grid g32 = make_grid(32);
  const RealVectorField tg = taylor_green(g32);
  WindowConfig cfg;
  cfg.delta_t = 1e-2;
  const WindowResult w = picard_window(tg, cfg, p, mol);
  CHECK(sup_norm(approx_step(tg, 1e-2, p, mol) - w.u_end) <= 1e-4);
}

TEST_CASE("approx_step is first-order consistent") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-3};
  const RealVectorField u0 = smooth_random(g, 12);
  std::vector<double> diffs;
  for (double t : {0.04, 0.02, 0.01}) {
    WindowConfig cfg;
    cfg.delta_t = t;
    cfg.substeps = 9;
    const WindowResult w = picard_window(u0, cfg, p, mol);
    diffs.push_back(sup_norm(approx_step(u0, t, p, mol) - w.u_end));
  }
  for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
    const double ratio = diffs[i] / diffs[i + 1];
    CAPTURE(ratio);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));
  }
}

TEST_CASE("mollifier convergence") {
  // The window fixed point satisfies delta u = B u0 - S N and both B and S
  // carry the factor delta, so epsilon drops out on every k != 0 mode. The
  // gaps between epsilon and epsilon / 2 sit at the rounding floor.
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const RealVectorField u0 = smooth_random(g, 21);
  WindowConfig cfg;
  for (WindowMode mode : {WindowMode::ModeSolved, WindowMode::PaperLiteral}) {
    cfg.mode = mode;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const Trajectory a = march(u0, 0.05, cfg, p, MollifierParams{eps});
      const Trajectory b = march(u0, 0.05, cfg, p, MollifierParams{eps / 2});
      CAPTURE(eps);
      CHECK(sup_norm(a.final_state - b.final_state) <= 1e-13 * sup_norm(u0));
    }
  }
}

TEST_CASE("q-ansatz fit") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const MollifierParams mol{1e-3};
  const RealVectorField u0 = taylor_green(g);

  for (double t : {1e-3, 1e-2, 5e-2}) {
    CAPTURE(t);
    const QFit fit = fit_q_ansatz(u0, t, p, mol);
    const QResidual residual(u0, t, p, mol);
    double best_q = 0.0, best = INFINITY;
    for (int i = 0; i <= 5000; ++i) {
      const double q = 0.01 * i;
      const double r = residual(q);
      if (r < best) {
        best = r;
        best_q = q;
      }
    }
    CHECK(std::abs(fit.q - best_q) <= 0.01);
    CHECK(fit.residual <= best + 1e-15);
    CHECK_FALSE(fit.degenerate);
  }

  const QFit zero = fit_q_ansatz(RealVectorField(g), 1e-2, p, mol);
  CHECK(zero.degenerate);
  CHECK(zero.residual == 0.0);

  // As t -> 0 the residual at any q tends to the initial split gap.
  const QResidual tiny(u0, 1e-12, p, mol);
  const double gap = initial_split_gap(u0, mol);
  for (double q : {0.0, 1.0, 10.0}) CHECK(std::abs(tiny(q) - gap) <= 1e-10);
}

TEST_CASE("a priori monitor") {
  const Grid g = make_grid(8);
  SUBCASE("exact decay trajectory") {
    const RealVectorField u0 = taylor_green(g);
    Trajectory traj;
    traj.initial = measure(u0, 0.0);
    for (int k = 1; k <= 20; ++k) {
      traj.records.push_back(
          measure(exact_decay_solution(FlowKind::TaylorGreen, u0, 0.05 * k, 0.1), 0.05 * k));
    }
    const AprioriReport r = apriori_monitor(traj);
    CHECK(r.sup_monotone());
    CHECK(r.l2_monotone());
  }
  SUBCASE("single window of zero flow") {
    const Trajectory traj = march(RealVectorField(g), 1e-2, WindowConfig{}, PhysicalParams{0.1},
                                  MollifierParams{});
    CHECK(apriori_monitor(traj).sup_monotone());
    CHECK(apriori_monitor(traj).l2_monotone());
  }
  SUBCASE("growth is flagged with its window") {
    const RealVectorField u0 = taylor_green(g);
    Trajectory traj;
    traj.initial = measure(u0, 0.0);
    traj.records.push_back(measure(0.9 * u0, 0.1));
    traj.records.push_back(measure(1.1 * u0, 0.2));
    traj.records.push_back(measure(1.0 * u0, 0.3));
    const AprioriReport r = apriori_monitor(traj);
    REQUIRE(r.sup_violations.size() == 1);
    CHECK(r.sup_violations[0].window == 1);
    CHECK(r.sup_violations[0].t == 0.2);
    CHECK(r.l2_violations.size() == 1);
    CHECK(apriori_monitor(traj, 1.0, 10.0).sup_monotone());
  }
}

TEST_CASE("oracle integrator") {
  const Grid g = make_grid(16);
  const PhysicalParams p{0.1};
  const RealVectorField u0 = taylor_green(g);
  const Trajectory traj = oracle_integrate(u0, 0.1, 1e-3, p);
  CHECK(traj.records.size() == 100);
  const RealVectorField exact = exact_decay_solution(FlowKind::TaylorGreen, u0, 0.1, 0.1);
  CHECK(sup_norm(traj.final_state - exact) <= 1e-6);

  const Trajectory zero = oracle_integrate(RealVectorField(g), 0.01, 1e-3, p);
  CHECK(sup_norm(zero.final_state) == 0.0);
  for (const auto& r : zero.records) CHECK(r.sup_norm == 0.0);

  try {
    (void)oracle_integrate(100.0 * u0, 0.1, 1e-2, p);
    FAIL("expected CflViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CflViolation);
  }
}

TEST_CASE("diagnostics record") {
  const Grid g = make_grid(16);
  const RealVectorField u = taylor_green(g);
  const DiagnosticsRecord r = measure(u, 0.5, 3, 1e-12);
  // TG: L2^2 = (2 pi)^3 / 2, |curl|^2 integral = 4 (2 pi)^3 / 4.
  const double vol = std::pow(2 * std::numbers::pi, 3);
  CHECK(r.l2_energy == doctest::Approx(0.5 * vol / 2.0));
  CHECK(r.enstrophy == doctest::Approx(0.5 * vol));
  CHECK(r.sup_norm == doctest::Approx(2.0));
  CHECK(r.picard_iters == 3);
  CHECK(r.t == 0.5);
}
