#include <cmath>
#include <string>

#include "doctest.h"
#include "support.hpp"

#include "burgers/basis.hpp"
#include "burgers/solver.hpp"
#include "burgers/verify.hpp"

using namespace burgers;

namespace {

CaseConfig case1() {
  CaseConfig c;
  c.T = 1.0;
  c.dt = 1e-2;
  return c;
}

std::string error_of(const CaseConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("CaseConfig validation") {
  CHECK(error_of(case1()).empty());

  CaseConfig c = case1();
  c.T = 1.0;
  c.dt = 0.3;
  const std::string msg = error_of(c);
  CHECK(msg.find("T/dt") != std::string::npos);
  CHECK(msg.find("0.29999999999999999") != std::string::npos);
  CHECK(msg.find("T = 1") != std::string::npos);

  c = case1();
  c.nu = 0.0;
  CHECK(error_of(c).rfind("nu:", 0) == 0);
  c = case1();
  c.dt = -1.0;
  CHECK(error_of(c).rfind("dt:", 0) == 0);
  c = case1();
  c.snapshot_stride = 3;  // 100 steps
  CHECK(error_of(c).rfind("snapshot_stride:", 0) == 0);
  c = case1();
  c.forcing = {1.0, 2.0};
  CHECK(error_of(c).rfind("forcing:", 0) == 0);
}

TEST_CASE("newton_jacobian") {
  const Mesh mesh = build_mesh(8);
  const Tridiagonal zero = newton_jacobian(FEVector(mesh), mesh);
  for (double v : zero.diagonal) CHECK(v == 0.0);
  for (double v : zero.lower) CHECK(v == 0.0);
  for (double v : zero.upper) CHECK(v == 0.0);

  std::mt19937_64 rng(11);
  const FEVector u = testing::random_fe(mesh, rng);
  const Tridiagonal j1 = newton_jacobian(u, mesh);
  const Tridiagonal j2 = newton_jacobian(2.0 * u, mesh);
  for (std::size_t i = 0; i < j1.size(); ++i) CHECK(j2.diagonal[i] == doctest::Approx(2.0 * j1.diagonal[i]));
  for (std::size_t i = 0; i + 1 < j1.size(); ++i) {
    CHECK(j2.lower[i] == doctest::Approx(2.0 * j1.lower[i]));
    CHECK(j2.upper[i] == doctest::Approx(2.0 * j1.upper[i]));
  }

  for (int n : {8, 32, 128}) {
    const Mesh m = build_mesh(n);
    const auto report = verify::jacobian_check(testing::random_fe(m, rng), m, 1e-6, 1e-6);
    CHECK_MESSAGE(report.pass, report.name << " err " << report.max_abs_err);
  }
}

TEST_CASE("backward Euler step") {
  const CaseConfig cfg = case1();
  const Mesh mesh = cfg.mesh();
  const BandedSymMatrix m = assemble_mass(mesh);
  const BandedSymMatrix k = assemble_stiffness(mesh);

  CHECK(step_backward_euler(FEVector(mesh), cfg, m, k) == FEVector(mesh));

  const FEVector u0 = interpolate_step_ic(mesh);
  const FEVector u1 = step_backward_euler(u0, cfg, m, k);
  CHECK(inner(u1, u1, m) <= inner(u0, u0, m));

  // Independent lagged-convection solve of the same nonlinear system.
  const FEVector ref = verify::picard_solve(u0, cfg);
  CHECK((u1 - ref).max_abs() <= 1e-10);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const FEVector u = testing::random_fe(mesh, rng);
    const FEVector next = step_backward_euler(u, cfg, m, k);
    CHECK(inner(next, next, m) <= inner(u, u, m));
  }
}

TEST_CASE("Newton failure is reported with the step index") {
  CaseConfig cfg = case1();
  cfg.newton_max_iter = 1;
  cfg.newton_tol = 1e-300;
  try {
    run_case(cfg);
    FAIL("expected NewtonError");
  } catch (const NewtonError& e) {
    CHECK(e.step() == 1);
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > 0.0);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("run_case on Case 1") {
  const CaseConfig cfg = case1();
  const Mesh mesh = cfg.mesh();
  const BandedSymMatrix m = assemble_mass(mesh);
  const double lambda1 = build_spectral(m, assemble_stiffness(mesh), 1).eigenvalues[0];

  int worst_newton = 0;
  bool monotone = true;
  bool quantified = true;
  const SnapshotSet snaps = run_case(cfg, [&](const StepReport& r) {
    worst_newton = std::max(worst_newton, r.iterations);
    const double before = std::sqrt(inner(*r.u_old, *r.u_old, m));
    const double after = std::sqrt(inner(*r.u_new, *r.u_new, m));
    monotone = monotone && after <= before;
    quantified = quantified && after * (1.0 + cfg.nu * cfg.dt * lambda1) <= before * (1.0 + 1e-14);
  });
  CHECK(snaps.size() == 101);
  CHECK(snaps.times.front() == 0.0);
  CHECK(snaps.times.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(snaps.states.front() == interpolate_step_ic(mesh));
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    CHECK(snaps.times[i] - snaps.times[i - 1] == doctest::Approx(cfg.dt).epsilon(1e-9));
  }
  CHECK(worst_newton <= 8);
  CHECK(monotone);
  CHECK(quantified);
}

TEST_CASE("snapshot counts") {
  CaseConfig c;
  c.T = 10.0;
  c.dt = 1e-2;
  CHECK(c.num_snapshots() == 1001);
  CHECK(run_case(c).size() == 1001);

  c.dt = 2e-5;
  c.snapshot_stride = 50;
  c.validate();
  CHECK(c.num_steps() == 500000);
  CHECK(c.num_snapshots() == 10001);
}

TEST_CASE("first-order convergence in dt") {
  auto final_state = [](double dt) {
    CaseConfig c;
    c.T = 0.1;
    c.dt = dt;
    return run_case(c).states.back();
  };
  const FEVector a = final_state(4e-3);
  const FEVector b = final_state(2e-3);
  const FEVector c = final_state(1e-3);
  const BandedSymMatrix m = assemble_mass(build_mesh(128));
  const double d1 = std::sqrt(inner(a - b, a - b, m));
  const double d2 = std::sqrt(inner(b - c, b - c, m));
  const double order = std::log2(d1 / d2);
  CHECK(order >= 0.8);
  CHECK(order <= 1.2);
}
