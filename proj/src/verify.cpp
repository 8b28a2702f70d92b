#include "burgers/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "burgers/basis.hpp"
#include "burgers/energy.hpp"

namespace burgers::verify {

GaussRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: points must be >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

namespace {

// Nodal value including the Dirichlet ends: node 0 and node n_cells are zero.
double full_node(const FEVector& u, int node, int n_cells) {
  return node <= 0 || node >= n_cells ? 0.0 : u[static_cast<std::size_t>(node - 1)];
}

// N(u)_i = int u u_x phi_i by element quadrature.
std::vector<double> convection_oracle(const FEVector& u, const Mesh& mesh, const GaussRule& g) {
  std::vector<double> out(static_cast<std::size_t>(mesh.n_dof), 0.0);
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double ul = full_node(u, c, mesh.n_cells);
    const double ur = full_node(u, c + 1, mesh.n_cells);
    const double ux = (ur - ul) / mesh.h;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double s = 0.5 * (g.nodes[q] + 1.0);
      const double wq = 0.5 * mesh.h * g.weights[q];
      const double uq = ul * (1.0 - s) + ur * s;
      if (c >= 1) out[static_cast<std::size_t>(c - 1)] += wq * uq * ux * (1.0 - s);
      if (c + 1 <= mesh.n_dof) out[static_cast<std::size_t>(c)] += wq * uq * ux * s;
    }
  }
  return out;
}

// Dense element-by-element assembly of a * M + b * K + C(w), where
// C(w)_ij = int w phi_j' phi_i. Pass w = nullptr to drop C.
Dense assemble_dense(const Mesh& mesh, double a, double b, const FEVector* w, const GaussRule& g) {
  Dense out(static_cast<std::size_t>(mesh.n_dof));
  for (int c = 0; c < mesh.n_cells; ++c) {
    const int nodes[2] = {c, c + 1};
    const double dphi[2] = {-1.0 / mesh.h, 1.0 / mesh.h};
    const double wl = w ? full_node(*w, c, mesh.n_cells) : 0.0;
    const double wr = w ? full_node(*w, c + 1, mesh.n_cells) : 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double s = 0.5 * (g.nodes[q] + 1.0);
      const double wq = 0.5 * mesh.h * g.weights[q];
      const double phi[2] = {1.0 - s, s};
      const double wv = wl * (1.0 - s) + wr * s;
      for (int r = 0; r < 2; ++r) {
        if (nodes[r] < 1 || nodes[r] > mesh.n_dof) continue;
        for (int k = 0; k < 2; ++k) {
          if (nodes[k] < 1 || nodes[k] > mesh.n_dof) continue;
          double v = a * phi[r] * phi[k] + b * dphi[r] * dphi[k];
          if (w) v += wv * dphi[k] * phi[r];
          out(static_cast<std::size_t>(nodes[r] - 1), static_cast<std::size_t>(nodes[k] - 1)) += wq * v;
        }
      }
    }
  }
  return out;
}

std::vector<double> dense_multiply(const Dense& a, std::span<const double> x) {
  std::vector<double> y(a.n, 0.0);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) y[i] += a(i, j) * x[j];
  }
  return y;
}

FEVector random_vector(const Mesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FEVector v(mesh);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return v;
}

// int |u| |v_x| |w|, the scale against which cancellation in b(u, v, w) is measured.
double trilinear_magnitude(const FEVector& u, const FEVector& v, const FEVector& w, const Mesh& mesh) {
  double total = 0.0;
  const GaussRule g = gauss_legendre(6);
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double ul = full_node(u, c, mesh.n_cells), ur = full_node(u, c + 1, mesh.n_cells);
    const double wl = full_node(w, c, mesh.n_cells), wr = full_node(w, c + 1, mesh.n_cells);
    const double vx = std::abs(full_node(v, c + 1, mesh.n_cells) - full_node(v, c, mesh.n_cells)) / mesh.h;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double s = 0.5 * (g.nodes[q] + 1.0);
      total += 0.5 * mesh.h * g.weights[q] * vx * std::abs((ul + (ur - ul) * s) * (wl + (wr - wl) * s));
    }
  }
  return total;
}

OracleReport make_report(std::string name, double abs_err, double rel_err, double tol, bool use_rel,
                         std::string detail = {}) {
  OracleReport r{std::move(name), abs_err, rel_err, false, tol, std::move(detail)};
  r.pass = (use_rel ? rel_err : abs_err) <= tol;
  return r;
}

// ---- individual oracle groups ----------------------------------------------

void trilinear_group(std::vector<OracleReport>& out) {
  std::mt19937_64 rng(20240601);
  double abs_err = 0.0;
  double rel_err = 0.0;
  for (int n : {4, 16, 128}) {
    const Mesh mesh = build_mesh(n);
    for (int trial = 0; trial < 20; ++trial) {
      const FEVector u = random_vector(mesh, rng);
      const FEVector v = random_vector(mesh, rng);
      const FEVector w = random_vector(mesh, rng);
      const double ref = trilinear_oracle(u, v, w, mesh, 10);
      const double got = trilinear(u, v, w, mesh);
      abs_err = std::max(abs_err, std::abs(got - ref));
      rel_err = std::max(rel_err, std::abs(got - ref) / trilinear_magnitude(u, v, w, mesh));
    }
  }
  out.push_back(make_report("trilinear_vs_quadrature", abs_err, rel_err, 1e-12, true,
                            "n_cells 4, 16, 128; relative to int |u v_x w|"));

  double cubic = 0.0;
  double cubic_oracle = 0.0;
  const Mesh mesh = build_mesh(128);
  for (int trial = 0; trial < 100; ++trial) {
    const FEVector v = random_vector(mesh, rng);
    cubic = std::max(cubic, std::abs(trilinear(v, v, v, mesh)));
    cubic_oracle = std::max(cubic_oracle, std::abs(trilinear_oracle(v, v, v, mesh, 10)));
  }
  out.push_back(make_report("trilinear_cubic_cancellation", cubic, cubic, 1e-13, false, "100 random v"));
  out.push_back(make_report("oracle_cubic_cancellation", cubic_oracle, cubic_oracle, 1e-13, false, "100 random v"));
}

void jacobian_group(std::vector<OracleReport>& out) {
  std::mt19937_64 rng(7);
  for (int n : {8, 128}) {
    const Mesh mesh = build_mesh(n);
    OracleReport r = jacobian_check(random_vector(mesh, rng), mesh);
    r.name += "_n" + std::to_string(n);
    out.push_back(r);
  }
}

void picard_group(std::vector<OracleReport>& out) {
  CaseConfig cfg;  // Case 1 parameters
  cfg.T = 1.0;
  cfg.dt = 1e-2;
  double worst = 0.0;
  std::string steps;
  run_case(cfg, [&](const StepReport& rep) {
    if (rep.step != 1 && rep.step % 25 != 0) return;
    const FEVector ref = picard_solve(*rep.u_old, cfg);
    worst = std::max(worst, (ref - *rep.u_new).max_abs());
    steps += (steps.empty() ? "" : " ") + std::to_string(rep.step);
  });
  out.push_back(make_report("newton_vs_picard", worst, worst, 1e-10, false, "steps " + steps));

  const Mesh mesh = cfg.mesh();
  const double zero = picard_solve(FEVector(mesh), cfg).max_abs();
  out.push_back(make_report("picard_zero_fixed_point", zero, zero, 0.0, false));
}

void spectrum_group(std::vector<OracleReport>& out) {
  const Mesh mesh = build_mesh(128);
  const BasisSet spec = build_spectral(assemble_mass(mesh), assemble_stiffness(mesh), 10);
  const AnalyticMode first = analytic_spectrum(1, mesh);
  const double l1 = std::abs(spec.eigenvalues[0] / first.eigenvalue - 1.0);
  out.push_back(make_report("spectral_lambda1", std::abs(spec.eigenvalues[0] - first.eigenvalue), l1, 1e-3, true));

  // 0 <= lambda_k^h / (k pi)^2 - 1 <= (k h)^2, i.e. C = 1 >= pi^2 / 12.
  double worst = 0.0;
  bool ordered = true;
  for (int k = 1; k <= 10; ++k) {
    const double rel = spec.eigenvalues[static_cast<std::size_t>(k - 1)] / analytic_spectrum(k, mesh).eigenvalue - 1.0;
    ordered = ordered && rel >= 0.0;
    worst = std::max(worst, rel / (k * k * mesh.h * mesh.h));
  }
  OracleReport conv = make_report("spectral_convergence", worst, worst, 1.0, true, "max (ratio - 1) / (k h)^2, k <= 10");
  conv.pass = conv.pass && ordered;
  out.push_back(conv);

  double shape = 0.0;
  const FEVector& w1 = spec.vectors[0];
  for (std::size_t i = 0; i < w1.size(); ++i) shape = std::max(shape, std::abs(w1[i] - first.values[i]));
  out.push_back(make_report("spectral_w1_shape", shape, shape / first.values.max_abs(), 1e-2, true));
}

void solve_group(std::vector<OracleReport>& out) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  for (int n : {3, 8, 127}) {
    for (int trial = 0; trial < 5; ++trial) {
      BandedSymMatrix a;
      a.off_diagonal.resize(static_cast<std::size_t>(n - 1));
      for (double& v : a.off_diagonal) v = dist(rng);
      a.diagonal.resize(static_cast<std::size_t>(n));
      for (double& v : a.diagonal) v = 2.5 + dist(rng);  // diagonally dominant -> SPD
      std::vector<double> b(static_cast<std::size_t>(n));
      for (double& v : b) v = dist(rng);

      Dense d(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        d(i, i) = a.diagonal[i];
        if (i + 1 < n) d(i, i + 1) = d(i + 1, i) = a.off_diagonal[i];
      }
      const auto ref = dense_lu_solve(d, b);
      const auto got = solve_banded(a, b);
      double num = 0.0;
      double den = 0.0;
      for (int i = 0; i < n; ++i) {
        num = std::max(num, std::abs(got[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
      }
      worst = std::max(worst, num / den);
    }
  }
  out.push_back(make_report("banded_vs_dense_lu", worst, worst, 1e-12, true, "random SPD tridiagonal"));

  // Assembled P1 matrices against dense quadrature assembly.
  const GaussRule g = gauss_legendre(3);
  double err = 0.0;
  for (int n : {2, 4, 8, 128}) {
    const Mesh mesh = build_mesh(n);
    const Dense dm = assemble_dense(mesh, 1.0, 0.0, nullptr, g);
    const Dense dk = assemble_dense(mesh, 0.0, 1.0, nullptr, g);
    const BandedSymMatrix m = assemble_mass(mesh);
    const BandedSymMatrix k = assemble_stiffness(mesh);
    for (int i = 0; i < mesh.n_dof; ++i) {
      err = std::max(err, std::abs(m.diagonal[i] - dm(i, i)) / dm(i, i));
      err = std::max(err, std::abs(k.diagonal[i] - dk(i, i)) / dk(i, i));
      if (i + 1 < mesh.n_dof) {
        err = std::max(err, std::abs(m.off_diagonal[i] - dm(i, i + 1)) / std::abs(dm(i, i + 1)));
        err = std::max(err, std::abs(k.off_diagonal[i] - dk(i, i + 1)) / std::abs(dk(i, i + 1)));
      }
    }
  }
  out.push_back(make_report("assembly_vs_quadrature", err, err, 1e-13, true, "n_cells 2, 4, 8, 128"));
}

void tables_group(std::vector<OracleReport>& out, const OracleOptions& options) {
  if (options.goldens.empty() || options.table_config.empty()) {
    throw std::invalid_argument("scope 'tables' needs a golden directory and a table config");
  }
  const RunConfig rc = load_run_config(options.table_config);
  const auto golden_path =
      options.goldens / (rc.case_id + "_" + std::string(to_string(rc.basis_kind)) + "_table.csv");
  const std::vector<AveragedBudget> golden = read_table(golden_path);
  const TableResult fresh = run_table(rc.sim, rc.table_options(options.jobs));

  double abs_err = 0.0;
  double rel_err = 0.0;
  bool same_rows = golden.size() == fresh.rows.size();
  for (std::size_t i = 0; same_rows && i < golden.size(); ++i) {
    same_rows = golden[i].m == fresh.rows[i].m;
    const double pairs[2][2] = {{golden[i].avg_e_m, fresh.rows[i].avg_e_m}, {golden[i].avg_E_m, fresh.rows[i].avg_E_m}};
    for (const auto& p : pairs) {
      abs_err = std::max(abs_err, std::abs(p[0] - p[1]));
      rel_err = std::max(rel_err, std::abs(p[0] - p[1]) / std::max(std::abs(p[0]), 1e-300));
    }
  }
  OracleReport r = make_report("table_regression_" + rc.case_id, abs_err, rel_err, 1e-9, true,
                               golden_path.filename().string());
  if (!same_rows) {
    r.pass = false;
    r.detail += " (row set differs)";
  }
  out.push_back(r);
}

}  // namespace

double trilinear_oracle(const FEVector& u, const FEVector& v, const FEVector& w, const Mesh& mesh,
                        int points_per_cell) {
  if (points_per_cell < 5) throw std::invalid_argument("trilinear_oracle: points_per_cell must be >= 5");
  check_on_mesh(u, mesh, "trilinear_oracle");
  check_on_mesh(v, mesh, "trilinear_oracle");
  check_on_mesh(w, mesh, "trilinear_oracle");
  const GaussRule g = gauss_legendre(points_per_cell);
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells; ++c) {
    const double ul = full_node(u, c, mesh.n_cells), ur = full_node(u, c + 1, mesh.n_cells);
    const double wl = full_node(w, c, mesh.n_cells), wr = full_node(w, c + 1, mesh.n_cells);
    const double vx = (full_node(v, c + 1, mesh.n_cells) - full_node(v, c, mesh.n_cells)) / mesh.h;
    double cell = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double s = 0.5 * (g.nodes[q] + 1.0);
      cell += g.weights[q] * (ul + (ur - ul) * s) * (wl + (wr - wl) * s);
    }
    total += 0.5 * mesh.h * vx * cell;
  }
  return total;
}

std::vector<double> dense_lu_solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.n;
  if (b.size() != n) throw DimensionError("dense_lu_solve: size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (std::abs(a(piv, k)) < 1e-300) throw SingularMatrixError("dense_lu_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

FEVector picard_solve(const FEVector& u_old, const CaseConfig& cfg, double tol, int max_iter) {
  cfg.validate();
  const Mesh mesh = cfg.mesh();
  check_on_mesh(u_old, mesh, "picard_solve");
  const GaussRule g = gauss_legendre(4);

  const Dense base = assemble_dense(mesh, 1.0 / cfg.dt, cfg.nu, nullptr, g);
  const Dense mass = assemble_dense(mesh, 1.0, 0.0, nullptr, g);
  std::vector<double> rhs = dense_multiply(mass, u_old.values());
  for (double& v : rhs) v /= cfg.dt;
  if (!cfg.forcing.empty()) {
    const auto mf = dense_multiply(mass, cfg.forcing);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += mf[i];
  }

  FEVector u = u_old;
  double res = 0.0;
  for (int it = 0; it <= max_iter; ++it) {
    const auto au = dense_multiply(base, u.values());
    const auto nu = convection_oracle(u, mesh, g);
    res = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) res = std::max(res, std::abs(au[i] + nu[i] - rhs[i]));
    if (res <= tol) return u;
    if (it == max_iter) break;
    u = FEVector(mesh, dense_lu_solve(assemble_dense(mesh, 1.0 / cfg.dt, cfg.nu, &u, g), rhs));
  }
  std::ostringstream msg;
  msg << "picard_solve: no convergence after " << max_iter << " iterations (residual " << res << ")";
  throw std::runtime_error(msg.str());
}

AnalyticMode analytic_spectrum(int k, const Mesh& mesh) {
  if (k < 1) throw std::invalid_argument("analytic_spectrum: k must be >= 1");
  AnalyticMode mode{k * k * std::numbers::pi * std::numbers::pi, FEVector(mesh)};
  for (int i = 0; i < mesh.n_dof; ++i) {
    mode.values[static_cast<std::size_t>(i)] = std::numbers::sqrt2 * std::sin(k * std::numbers::pi * mesh.node(i));
  }
  return mode;
}

OracleReport jacobian_check(const FEVector& u, const Mesh& mesh, double eps, double tol) {
  const Tridiagonal j = newton_jacobian(u, mesh);
  const GaussRule g = gauss_legendre(3);
  const auto n = static_cast<std::size_t>(mesh.n_dof);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    FEVector up = u, um = u;
    up[col] += eps;
    um[col] -= eps;
    const auto np = convection_oracle(up, mesh, g);
    const auto nm = convection_oracle(um, mesh, g);
    for (std::size_t row = 0; row < n; ++row) {
      double analytic = 0.0;
      if (row == col) analytic = j.diagonal[row];
      if (row == col + 1) analytic = j.lower[col];
      if (col == row + 1) analytic = j.upper[row];
      const double fd = (np[row] - nm[row]) / (2.0 * eps);
      worst = std::max(worst, std::abs(fd - analytic));
      scale = std::max(scale, std::abs(analytic));
    }
  }
  return make_report("jacobian_vs_central_difference", worst, scale > 0 ? worst / scale : worst, tol, false,
                     "eps " + format_double(eps));
}

std::vector<OracleReport> run_oracles(const OracleOptions& options) {
  const std::string& s = options.scope;
  static const char* known[] = {"all", "trilinear", "jacobian", "picard", "spectrum", "solve", "tables"};
  if (std::find(std::begin(known), std::end(known), s) == std::end(known)) {
    throw std::invalid_argument("unknown verify scope '" + s +
                                "' (expected all, trilinear, jacobian, picard, spectrum, solve, tables)");
  }
  std::vector<OracleReport> out;
  const bool all = s == "all";
  if (all || s == "trilinear") trilinear_group(out);
  if (all || s == "jacobian") jacobian_group(out);
  if (all || s == "picard") picard_group(out);
  if (all || s == "spectrum") spectrum_group(out);
  if (all || s == "solve") solve_group(out);
  if (s == "tables" || (all && !options.goldens.empty() && !options.table_config.empty())) {
    tables_group(out, options);
  }
  return out;
}

}  // namespace burgers::verify
