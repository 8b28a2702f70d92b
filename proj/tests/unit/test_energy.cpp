#include <cmath>
#include <string>

#include "doctest.h"
#include "support.hpp"

#include "burgers/energy.hpp"
#include "burgers/verify.hpp"

using namespace burgers;

namespace {

CaseConfig case1() {
  CaseConfig c;
  c.T = 1.0;
  c.dt = 1e-2;
  return c;
}

const SnapshotSet& case1_snapshots() {
  static const SnapshotSet snaps = run_case(case1());
  return snaps;
}

}  // namespace

TEST_CASE("trapezoid_average") {
  CHECK(trapezoid_average(std::vector<double>(11, 2.5), 10) == doctest::Approx(2.5).epsilon(1e-15));

  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(i / 10.0);
  CHECK(trapezoid_average(t, 10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(trapezoid_average(std::vector<double>{0.0, 0.25, 1.0}, 2) == 0.375);

  // Affine sequences: exact mean of the endpoints; shift invariance.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    const int n = 1 + trial * 7;
    std::vector<double> v, shifted;
    for (int i = 0; i <= n; ++i) {
      v.push_back(a + b * i / n);
      shifted.push_back(v.back() + c);
    }
    CHECK(trapezoid_average(v, n) == doctest::Approx(a + 0.5 * b).epsilon(1e-13));
    CHECK(trapezoid_average(shifted, n) - c == doctest::Approx(trapezoid_average(v, n)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(trapezoid_average(std::vector<double>{1.0, 2.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(trapezoid_average(std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST_CASE("pointwise_budget") {
  const CaseConfig cfg = case1();
  const Mesh mesh = cfg.mesh();
  const BandedSymMatrix m = assemble_mass(mesh);
  const BandedSymMatrix k = assemble_stiffness(mesh);
  const BasisSet pod = build_pod(case1_snapshots(), m);
  const BasisSet spec = build_spectral(m, k, 127);

  SUBCASE("a basis vector has no complement") {
    for (int mm : {1, 2, 5}) {
      const PointwiseBudget b = pointwise_budget(pod.vectors[0], pod, mm, cfg);
      CHECK(std::abs(b.e_up) <= 1e-12);
      CHECK(std::abs(b.e_down) <= 1e-12);
      CHECK(std::abs(b.e_m) <= 1e-12);
      CHECK(std::abs(b.E_m) <= 1e-12);
    }
  }

  SUBCASE("spectral basis: E_m vanishes") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const FEVector u = testing::random_fe(mesh, rng);
      const int mm = 1 + trial * 5;
      const PointwiseBudget b = pointwise_budget(u, spec, mm, cfg);
      const ModeSplit s = project(u, spec, mm, m);
      const double scale = std::sqrt(inner(s.y, s.y, k) * inner(s.z, s.z, k));
      CHECK(std::abs(b.E_m) <= 1e-10 * cfg.nu * scale);
    }
  }

  SUBCASE("random state on a coarse mesh against quadrature") {
    CaseConfig coarse = cfg;
    coarse.n_cells = 8;
    const Mesh cm = coarse.mesh();
    const BandedSymMatrix cmass = assemble_mass(cm);
    std::mt19937_64 rng(33);
    std::vector<FEVector> states;
    for (int i = 0; i < 7; ++i) states.push_back(testing::random_fe(cm, rng));
    const BasisSet b = build_pod(states, cmass);
    const FEVector u = testing::random_fe(cm, rng);
    const PointwiseBudget got = pointwise_budget(u, b, 2, coarse);
    const ModeSplit s = project(u, b, 2, cmass);
    CHECK(got.e_up == doctest::Approx(-verify::trilinear_oracle(s.y, s.y, s.z, cm, 10)).epsilon(1e-12));
    CHECK(std::abs(got.e_up + verify::trilinear_oracle(s.y, s.y, s.z, cm, 10)) <= 1e-12);
    CHECK(std::abs(got.e_down + verify::trilinear_oracle(s.z, s.z, s.y, cm, 10)) <= 1e-12);
    CHECK(got.e_m == got.e_up - got.e_down);
  }

  SUBCASE("m out of range") {
    CHECK_THROWS_AS(pointwise_budget(pod.vectors[0], pod, 0, cfg), std::out_of_range);
    CHECK_THROWS_AS(pointwise_budget(pod.vectors[0], pod, pod.dimension() + 1, cfg), std::out_of_range);
  }
}

// Resolved-energy balance of one backward Euler step: testing the discrete
// equation with y = P_m u^{n+1} gives
//   (y, u^{n+1} - u^n)_M / dt + nu |y|_K^2 = E_m(u^{n+1}) - e_m(u^{n+1}).
// This pins the sign convention of e_m independently of any table.
TEST_CASE("energy balance fixes the sign of e_m") {
  const CaseConfig cfg = case1();
  const SnapshotSet& snaps = case1_snapshots();
  const BudgetContext ctx = BudgetContext::build(cfg.n_cells, cfg.nu);
  const BasisSet pod = build_pod(snaps, ctx.mass);
  for (std::size_t step : {1u, 10u, 50u, 100u}) {
    for (int mm : {1, 3, 9, 20}) {
      const FEVector& u_new = snaps.states[step];
      const FEVector& u_old = snaps.states[step - 1];
      const ModeSplit s = project(u_new, pod, mm, ctx.mass);
      const double lhs = inner(s.y, u_new - u_old, ctx.mass) / cfg.dt + cfg.nu * inner(s.y, s.y, ctx.stiffness);
      const PointwiseBudget b = pointwise_budget(u_new, pod, mm, ctx);
      CHECK(lhs == doctest::Approx(b.E_m - b.e_m).epsilon(1e-6).scale(1e-3));
    }
  }
}

TEST_CASE("build_series") {
  const SnapshotSet& snaps = case1_snapshots();
  const BasisSet pod = build_pod(snaps, assemble_mass(build_mesh(128)));

  const EnergySeries s = build_series(snaps, pod, 3, 100);
  CHECK(s.times.size() == 101);
  CHECK(s.e_m.size() == 101);
  CHECK(s.times.front() == 0.0);
  CHECK(s.times.back() == 1.0);
  for (std::size_t i = 0; i < s.e_m.size(); ++i) CHECK(std::abs(s.e_m[i] - (s.e_up[i] - s.e_down[i])) <= 1e-12);

  CHECK(build_series(snaps, pod, 3, 1).times.size() == 2);
  CHECK(build_series(snaps, pod, 3, 20).times.size() == 21);

  try {
    build_series(snaps, pod, 3, 3);
    FAIL("expected misalignment error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("quadrature node 1") != std::string::npos);
  }
  CHECK_THROWS_AS(build_series(snaps, pod, 0, 100), std::out_of_range);
  CHECK_THROWS_AS(build_series(snaps, pod, 3, 0), std::invalid_argument);

  SUBCASE("nodes on every 10th step") {
    CaseConfig c;
    c.T = 1e-2;
    c.dt = 1e-4;
    const SnapshotSet fine = run_case(c);
    const BasisSet b = build_pod(fine, assemble_mass(build_mesh(128)));
    const EnergySeries es = build_series(fine, b, 2, 10);
    REQUIRE(es.times.size() == 11);
    for (std::size_t i = 0; i < es.times.size(); ++i) {
      CHECK(es.times[i] == doctest::Approx(fine.times[10 * i]).epsilon(1e-12));
      const PointwiseBudget direct = pointwise_budget(fine.states[10 * i], b, 2, c);
      CHECK(es.e_m[i] == direct.e_m);
    }
  }
}

TEST_CASE("averaged_budget and run_table") {
  const SnapshotSet& snaps = case1_snapshots();
  TableOptions o;
  o.m_list = {3, 9};
  o.n = 100;
  const TableResult r = run_table(snaps, o);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.avg_sum == row.avg_e_m + row.avg_E_m);
    CHECK(row.T == 1.0);
    CHECK(row.n == 100);
    CHECK(row.d == r.basis.dimension());
  }
  const EnergySeries s = build_series(snaps, r.basis, 3, 100);
  CHECK(r.rows[0].avg_e_m == trapezoid_average(s.e_m, 100));

  // Parallel evaluation is bit-identical.
  o.jobs = 4;
  const TableResult par = run_table(snaps, o);
  CHECK(par.rows[0].avg_e_m == r.rows[0].avg_e_m);
  CHECK(par.rows[1].avg_E_m == r.rows[1].avg_E_m);

  // z vanishes on the snapshot span when m = d.
  o.m_list = {r.basis.dimension()};
  const TableResult full = run_table(snaps, o);
  CHECK(std::abs(full.rows[0].avg_e_m) <= 1e-8 * 0.5);
  CHECK(std::abs(full.rows[0].avg_E_m) <= 1e-8 * 0.5);

  o.m_list = {r.basis.dimension() + 1};
  CHECK_THROWS_AS(run_table(snaps, o), std::out_of_range);
}

TEST_CASE("interval_tables") {
  CaseConfig c;
  c.T = 2.0;
  c.dt = 1e-2;
  const SnapshotSet snaps = run_case(c);
  const BasisSet b = build_pod(snaps, assemble_mass(build_mesh(128)));
  const auto tables = interval_tables(snaps, b, {3, 6}, {2.0, 1.0, 0.5});
  REQUIRE(tables.size() == 3);
  CHECK(tables[0].n == 200);
  CHECK(tables[1].n == 100);
  CHECK(tables[2].n == 50);
  TableOptions o;
  o.m_list = {3, 6};
  o.n = 100;
  const auto direct = budget_rows(snaps, b, o, 1.0);
  CHECK(tables[1].rows[0].avg_e_m == direct[0].avg_e_m);
  CHECK_THROWS_AS(interval_tables(snaps, b, {3}, {0.333}), std::invalid_argument);
  CHECK_THROWS_AS(interval_tables(snaps, b, {3}, {3.0}), std::invalid_argument);
}
