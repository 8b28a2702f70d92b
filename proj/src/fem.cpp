#include "burgers/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace burgers {

Mesh build_mesh(int n_cells) {
  if (n_cells < 2) {
    throw std::invalid_argument("build_mesh: n_cells must be >= 2, got " + std::to_string(n_cells));
  }
  return Mesh{n_cells, 1.0 / n_cells, n_cells - 1};
}

FEVector::FEVector(const Mesh& mesh, std::vector<double> values)
    : values_(std::move(values)), n_cells_(mesh.n_cells) {
  if (values_.size() != static_cast<std::size_t>(mesh.n_dof)) {
    std::ostringstream msg;
    msg << "FEVector: expected " << mesh.n_dof << " interior values, got " << values_.size();
    throw DimensionError(msg.str());
  }
}

FEVector& FEVector::operator+=(const FEVector& other) {
  check_same_mesh(*this, other, "FEVector::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

FEVector& FEVector::operator-=(const FEVector& other) {
  check_same_mesh(*this, other, "FEVector::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

FEVector& FEVector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void FEVector::axpy(double s, const FEVector& x) {
  check_same_mesh(*this, x, "FEVector::axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * x.values_[i];
}

double FEVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

FEVector operator+(FEVector a, const FEVector& b) { return a += b; }
FEVector operator-(FEVector a, const FEVector& b) { return a -= b; }
FEVector operator*(double s, FEVector a) { return a *= s; }

void Tridiagonal::add_scaled(double s, const BandedSymMatrix& a) {
  if (a.size() != size()) throw DimensionError("Tridiagonal::add_scaled: size mismatch");
  for (std::size_t i = 0; i < diagonal.size(); ++i) diagonal[i] += s * a.diagonal[i];
  for (std::size_t i = 0; i < upper.size(); ++i) {
    lower[i] += s * a.off_diagonal[i];
    upper[i] += s * a.off_diagonal[i];
  }
}

BandedSymMatrix assemble_mass(const Mesh& mesh) {
  const auto n = static_cast<std::size_t>(mesh.n_dof);
  return {std::vector<double>(n, 2.0 * mesh.h / 3.0), std::vector<double>(n - 1, mesh.h / 6.0)};
}

BandedSymMatrix assemble_stiffness(const Mesh& mesh) {
  const auto n = static_cast<std::size_t>(mesh.n_dof);
  return {std::vector<double>(n, 2.0 / mesh.h), std::vector<double>(n - 1, -1.0 / mesh.h)};
}

std::vector<double> multiply(const BandedSymMatrix& a, std::span<const double> x) {
  const std::size_t n = a.size();
  if (x.size() != n) throw DimensionError("multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = a.diagonal[i] * x[i];
    if (i > 0) s += a.off_diagonal[i - 1] * x[i - 1];
    if (i + 1 < n) s += a.off_diagonal[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x) {
  const std::size_t n = a.size();
  if (x.size() != n) throw DimensionError("multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = a.diagonal[i] * x[i];
    if (i > 0) s += a.lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += a.upper[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

FEVector multiply(const BandedSymMatrix& a, const FEVector& x) {
  FEVector y = x;
  auto v = multiply(a, x.values());
  std::copy(v.begin(), v.end(), y.values().begin());
  return y;
}

double inner(const FEVector& u, const FEVector& v, const BandedSymMatrix& a) {
  check_same_mesh(u, v, "inner");
  const std::size_t n = a.size();
  if (u.size() != n) throw DimensionError("inner: vector/matrix size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double av = a.diagonal[i] * v[i];
    if (i > 0) av += a.off_diagonal[i - 1] * v[i - 1];
    if (i + 1 < n) av += a.off_diagonal[i] * v[i + 1];
    s += u[i] * av;
  }
  return s;
}

namespace {

// Nodal value including the homogeneous boundary nodes; node index j runs 0..n_cells.
inline double nodal(const FEVector& f, int j, int n_cells) {
  return (j == 0 || j == n_cells) ? 0.0 : f[static_cast<std::size_t>(j - 1)];
}

}  // namespace

double trilinear(const FEVector& u, const FEVector& v, const FEVector& w, const Mesh& mesh) {
  check_on_mesh(u, mesh, "trilinear(u)");
  check_on_mesh(v, mesh, "trilinear(v)");
  check_on_mesh(w, mesh, "trilinear(w)");

  // Two-point Gauss on the reference cell [0,1]: xi = 1/2 -+ 1/(2 sqrt 3), weights 1/2.
  const double g = 0.5 / std::sqrt(3.0);
  const double xi0 = 0.5 - g;
  const double xi1 = 0.5 + g;

  const int nc = mesh.n_cells;
  double total = 0.0;
  for (int e = 0; e < nc; ++e) {
    const double ua = nodal(u, e, nc), ub = nodal(u, e + 1, nc);
    const double va = nodal(v, e, nc), vb = nodal(v, e + 1, nc);
    const double wa = nodal(w, e, nc), wb = nodal(w, e + 1, nc);
    const double dv = vb - va;  // v_x * h
    const double q0 = (ua + xi0 * (ub - ua)) * (wa + xi0 * (wb - wa));
    const double q1 = (ua + xi1 * (ub - ua)) * (wa + xi1 * (wb - wa));
    // \int_e u v_x w dx = h * 0.5 (q0 + q1) * dv / h
    total += 0.5 * (q0 + q1) * dv;
  }
  return total;
}

FEVector interpolate_step_ic(const Mesh& mesh) {
  if (mesh.n_cells % 2 != 0) {
    throw std::invalid_argument("interpolate_step_ic: n_cells must be even so that x = 1/2 is a node, got " +
                                std::to_string(mesh.n_cells));
  }
  FEVector u(mesh);
  const int half = mesh.n_cells / 2;  // node index of x = 1/2
  for (int i = 0; i < mesh.n_dof; ++i) u[i] = (i + 1 <= half) ? 1.0 : 0.0;
  return u;
}

std::vector<double> solve_banded(const Tridiagonal& a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionError("solve_banded: rhs size mismatch");
  if (n == 0) return {};
  std::vector<double> c(n, 0.0), x(n);
  double pivot = a.diagonal[0];
  if (std::abs(pivot) < 1e-300) throw SingularMatrixError("solve_banded: zero pivot at row 0");
  if (n > 1) c[0] = a.upper[0] / pivot;
  x[0] = b[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = a.diagonal[i] - a.lower[i - 1] * c[i - 1];
    if (std::abs(pivot) < 1e-300) {
      throw SingularMatrixError("solve_banded: zero pivot at row " + std::to_string(i));
    }
    if (i + 1 < n) c[i] = a.upper[i] / pivot;
    x[i] = (b[i] - a.lower[i - 1] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

std::vector<double> solve_banded(const BandedSymMatrix& a, std::span<const double> b) {
  return solve_banded(Tridiagonal(a), b);
}

FEVector solve_banded(const BandedSymMatrix& a, const FEVector& b) {
  return solve_banded(Tridiagonal(a), b);
}

FEVector solve_banded(const Tridiagonal& a, const FEVector& b) {
  FEVector x = b;
  auto v = solve_banded(a, b.values());
  std::copy(v.begin(), v.end(), x.values().begin());
  return x;
}

BidiagonalFactor cholesky(const BandedSymMatrix& a) {
  const std::size_t n = a.size();
  BidiagonalFactor l;
  l.diagonal.resize(n);
  l.sub_diagonal.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = a.diagonal[i];
    if (i > 0) d -= l.sub_diagonal[i - 1] * l.sub_diagonal[i - 1];
    if (!(d > 0.0)) throw SingularMatrixError("cholesky: matrix not positive definite at row " + std::to_string(i));
    l.diagonal[i] = std::sqrt(d);
    if (i + 1 < n) l.sub_diagonal[i] = a.off_diagonal[i] / l.diagonal[i];
  }
  return l;
}

std::vector<double> multiply_transpose(const BidiagonalFactor& l, std::span<const double> x) {
  const std::size_t n = l.size();
  if (x.size() != n) throw DimensionError("multiply_transpose: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = l.diagonal[i] * x[i];
    if (i + 1 < n) y[i] += l.sub_diagonal[i] * x[i + 1];
  }
  return y;
}

std::vector<double> solve_transpose(const BidiagonalFactor& l, std::span<const double> x) {
  const std::size_t n = l.size();
  if (x.size() != n) throw DimensionError("solve_transpose: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    if (i + 1 < n) s -= l.sub_diagonal[i] * y[i + 1];
    y[i] = s / l.diagonal[i];
  }
  return y;
}

void check_same_mesh(const FEVector& a, const FEVector& b, const char* what) {
  if (a.n_cells() != b.n_cells() || a.size() != b.size()) {
    std::ostringstream msg;
    msg << what << ": mesh mismatch (" << a.n_cells() << " vs " << b.n_cells() << " cells)";
    throw DimensionError(msg.str());
  }
}

void check_on_mesh(const FEVector& a, const Mesh& mesh, const char* what) {
  if (a.n_cells() != mesh.n_cells || a.size() != static_cast<std::size_t>(mesh.n_dof)) {
    std::ostringstream msg;
    msg << what << ": vector on " << a.n_cells() << "-cell mesh used with " << mesh.n_cells << "-cell mesh";
    throw DimensionError(msg.str());
  }
}

}  // namespace burgers
