#pragma once

/// Independent reference computations. None of these reuse the code path
/// they check: quadrature, assembly and linear solves are all separate.

#include <filesystem>
#include <string>
#include <vector>

#include "burgers/fem.hpp"
#include "burgers/io.hpp"
#include "burgers/solver.hpp"

namespace burgers::verify {

struct OracleReport {
  std::string name;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  std::string detail;
};

/// Gauss-Legendre nodes and weights on [-1, 1], from Newton iteration on P_n.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

/// Composite Gauss quadrature of u v_x w with `points_per_cell` >= 5 points.
double trilinear_oracle(const FEVector& u, const FEVector& v, const FEVector& w, const Mesh& mesh,
                        int points_per_cell = 10);

/// Row-major dense matrix for the oracle solvers.
struct Dense {
  std::size_t n = 0;
  std::vector<double> a;

  explicit Dense(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError.
std::vector<double> dense_lu_solve(Dense a, std::vector<double> b);

/// Backward Euler step by lagged-convection fixed point iteration to an
/// inf-norm residual of `tol`. Throws std::runtime_error after max_iter.
FEVector picard_solve(const FEVector& u_old, const CaseConfig& cfg, double tol = 1e-13, int max_iter = 500);

struct AnalyticMode {
  double eigenvalue = 0.0;
  FEVector values;
};
/// k^2 pi^2 and sqrt(2) sin(k pi x) at the interior nodes.
AnalyticMode analytic_spectrum(int k, const Mesh& mesh);

/// Analytic Newton Jacobian against central differences of convection().
OracleReport jacobian_check(const FEVector& u, const Mesh& mesh, double eps = 1e-6, double tol = 1e-6);

/// Scopes: all, trilinear, jacobian, picard, spectrum, solve, tables.
/// `tables` compares a fresh run of `table_config` against
/// <goldens>/<case_id>_<kind>_table.csv.
struct OracleOptions {
  std::string scope = "all";
  std::filesystem::path goldens;
  std::filesystem::path table_config;
  int jobs = 1;
};
std::vector<OracleReport> run_oracles(const OracleOptions& options);

}  // namespace burgers::verify
