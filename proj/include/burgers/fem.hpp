#pragma once

/// Piecewise-linear finite elements on a uniform partition of [0,1] with
/// homogeneous Dirichlet data. Boundary DOFs are eliminated: every vector and
/// matrix here is indexed by the n_cells - 1 interior nodes.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace burgers {

/// Thrown when operands live on different meshes or have mismatched sizes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the tridiagonal solvers on a vanishing pivot.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Mesh {
  int n_cells = 0;
  double h = 0.0;
  int n_dof = 0;

  /// Coordinate of interior node i (0-based), i.e. x = (i + 1) h.
  double node(int i) const { return (i + 1) * h; }

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

Mesh build_mesh(int n_cells);

/// Coefficients of a P1 function on the interior nodes of a mesh with
/// `n_cells` cells. The function vanishes at x = 0 and x = 1.
class FEVector {
 public:
  FEVector() = default;
  explicit FEVector(const Mesh& mesh) : values_(mesh.n_dof, 0.0), n_cells_(mesh.n_cells) {}
  FEVector(const Mesh& mesh, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  int n_cells() const { return n_cells_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  FEVector& operator+=(const FEVector& other);
  FEVector& operator-=(const FEVector& other);
  FEVector& operator*=(double s);

  /// this += s * x
  void axpy(double s, const FEVector& x);

  double max_abs() const;

  friend bool operator==(const FEVector&, const FEVector&) = default;

 private:
  std::vector<double> values_;
  int n_cells_ = 0;
};

FEVector operator+(FEVector a, const FEVector& b);
FEVector operator-(FEVector a, const FEVector& b);
FEVector operator*(double s, FEVector a);

/// Symmetric tridiagonal matrix.
struct BandedSymMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;  // entry (i, i+1) == (i+1, i)

  std::size_t size() const { return diagonal.size(); }
};

/// General (possibly nonsymmetric) tridiagonal matrix.
struct Tridiagonal {
  std::vector<double> lower;  // entry (i+1, i)
  std::vector<double> diagonal;
  std::vector<double> upper;  // entry (i, i+1)

  Tridiagonal() = default;
  explicit Tridiagonal(std::size_t n)
      : lower(n > 0 ? n - 1 : 0, 0.0), diagonal(n, 0.0), upper(n > 0 ? n - 1 : 0, 0.0) {}
  explicit Tridiagonal(const BandedSymMatrix& a)
      : lower(a.off_diagonal), diagonal(a.diagonal), upper(a.off_diagonal) {}

  std::size_t size() const { return diagonal.size(); }

  /// this += s * a
  void add_scaled(double s, const BandedSymMatrix& a);
};

BandedSymMatrix assemble_mass(const Mesh& mesh);
BandedSymMatrix assemble_stiffness(const Mesh& mesh);

/// y = A x
std::vector<double> multiply(const BandedSymMatrix& a, std::span<const double> x);
std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x);
FEVector multiply(const BandedSymMatrix& a, const FEVector& x);

/// u^T A v
double inner(const FEVector& u, const FEVector& v, const BandedSymMatrix& a);

/// b(u, v, w) = \int_0^1 u v_x w dx, evaluated with two-point Gauss per cell
/// (exact for the piecewise-quadratic integrand).
double trilinear(const FEVector& u, const FEVector& v, const FEVector& w, const Mesh& mesh);

/// Nodal interpolant of the step u0 = 1 on (0, 1/2], 0 on (1/2, 1].
/// Requires an even cell count so that x = 1/2 is a node.
FEVector interpolate_step_ic(const Mesh& mesh);

/// Thomas elimination. Throws SingularMatrixError if |pivot| < 1e-300.
std::vector<double> solve_banded(const Tridiagonal& a, std::span<const double> b);
std::vector<double> solve_banded(const BandedSymMatrix& a, std::span<const double> b);
FEVector solve_banded(const BandedSymMatrix& a, const FEVector& b);
FEVector solve_banded(const Tridiagonal& a, const FEVector& b);

/// Cholesky factor A = L L^T of an SPD tridiagonal matrix; L is lower bidiagonal.
struct BidiagonalFactor {
  std::vector<double> diagonal;
  std::vector<double> sub_diagonal;  // entry (i+1, i)

  std::size_t size() const { return diagonal.size(); }
};

BidiagonalFactor cholesky(const BandedSymMatrix& a);

/// y = L^T x
std::vector<double> multiply_transpose(const BidiagonalFactor& l, std::span<const double> x);
/// Solves L^T y = x.
std::vector<double> solve_transpose(const BidiagonalFactor& l, std::span<const double> x);

void check_same_mesh(const FEVector& a, const FEVector& b, const char* what);
void check_on_mesh(const FEVector& a, const Mesh& mesh, const char* what);

}  // namespace burgers
