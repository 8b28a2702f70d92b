#include "burgers/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace burgers {

std::string_view to_string(BasisKind kind) { return kind == BasisKind::Pod ? "pod" : "spectral"; }

BasisKind parse_basis_kind(std::string_view text) {
  if (text == "pod" || text == "POD") return BasisKind::Pod;
  if (text == "spectral" || text == "Spectral") return BasisKind::Spectral;
  throw std::invalid_argument("unknown basis kind '" + std::string(text) + "' (expected pod or spectral)");
}

namespace {

// Entry of largest magnitude made positive.
void fix_sign(FEVector& w) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (std::abs(w[i]) > std::abs(w[arg])) arg = i;
  }
  if (w.size() > 0 && w[arg] < 0.0) w *= -1.0;
}

// w = L^{-T} v for column k of an eigenvector matrix.
FEVector back_transform(const DenseMatrix& vectors, std::size_t k, const BidiagonalFactor& l, const Mesh& mesh) {
  std::vector<double> v(vectors.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
  return FEVector(mesh, solve_transpose(l, v));
}

}  // namespace

double default_rank_tol(std::size_t n_snapshots) {
  return static_cast<double>(n_snapshots) * std::numeric_limits<double>::epsilon();
}

BasisSet build_pod(const std::vector<FEVector>& states, const BandedSymMatrix& mass, std::optional<double> tol) {
  if (states.empty()) throw std::invalid_argument("build_pod: empty snapshot set");
  const double rank_tol = tol.value_or(default_rank_tol(states.size()));
  if (!(rank_tol >= 0.0)) throw std::invalid_argument("build_pod: rank_tol must be >= 0");
  const std::size_t n = mass.size();
  const Mesh mesh = build_mesh(static_cast<int>(n) + 1);
  for (const auto& s : states) check_on_mesh(s, mesh, "build_pod");

  const BidiagonalFactor l = cholesky(mass);

  // G = (1/n_s) sum_j (L^T s_j)(L^T s_j)^T
  DenseMatrix gram(n);
  const double scale = 1.0 / static_cast<double>(states.size());
  for (const auto& s : states) {
    const std::vector<double> q = multiply_transpose(l, s.values());
    for (std::size_t i = 0; i < n; ++i) {
      const double qi = q[i] * scale;
      if (qi == 0.0) continue;
      for (std::size_t j = 0; j <= i; ++j) gram(i, j) += qi * q[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) gram(j, i) = gram(i, j);
  }

  const EigenDecomposition eig = jacobi_eigh(std::move(gram));
  if (!(eig.values[0] > 0.0)) throw std::invalid_argument("build_pod: all snapshots are zero");

  BasisSet basis;
  basis.kind = BasisKind::Pod;
  basis.rank_tol = rank_tol;
  basis.n_cells = mesh.n_cells;
  const double cutoff = rank_tol * eig.values[0];
  for (std::size_t k = 0; k < n; ++k) {
    if (!(eig.values[k] > cutoff) || !(eig.values[k] > 0.0)) break;
    FEVector w = back_transform(eig.vectors, k, l, mesh);
    fix_sign(w);
    basis.vectors.push_back(std::move(w));
    basis.eigenvalues.push_back(eig.values[k]);
  }
  return basis;
}

BasisSet build_pod(const SnapshotSet& snaps, const BandedSymMatrix& mass, std::optional<double> rank_tol) {
  if (snaps.size() < 2) throw std::invalid_argument("build_pod: at least 2 snapshots are required");
  return build_pod(snaps.states, mass, rank_tol);
}

BasisSet build_spectral(const BandedSymMatrix& mass, const BandedSymMatrix& stiffness, int count) {
  const std::size_t n = mass.size();
  if (stiffness.size() != n) throw DimensionError("build_spectral: mass/stiffness size mismatch");
  if (count < 1 || static_cast<std::size_t>(count) > n) {
    throw std::invalid_argument("build_spectral: count " + std::to_string(count) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  const Mesh mesh = build_mesh(static_cast<int>(n) + 1);
  const BidiagonalFactor l = cholesky(mass);

  // C = L^{-1} K L^{-T}, built column by column from unit vectors.
  DenseMatrix c(n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const std::vector<double> col = multiply(stiffness, solve_transpose(l, e));  // K L^{-T} e_j
    // forward solve L x = col
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = col[i];
      if (i > 0) s -= l.sub_diagonal[i - 1] * x[i - 1];
      x[i] = s / l.diagonal[i];
    }
    for (std::size_t i = 0; i < n; ++i) c(i, j) = x[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) c(i, j) = c(j, i) = 0.5 * (c(i, j) + c(j, i));
  }

  const EigenDecomposition eig = jacobi_eigh(std::move(c));

  BasisSet basis;
  basis.kind = BasisKind::Spectral;
  basis.n_cells = mesh.n_cells;
  for (int k = 0; k < count; ++k) {
    const std::size_t col = n - 1 - static_cast<std::size_t>(k);  // ascending order
    FEVector w = back_transform(eig.vectors, col, l, mesh);
    fix_sign(w);
    basis.vectors.push_back(std::move(w));
    basis.eigenvalues.push_back(eig.values[col]);
  }
  return basis;
}

ModeSplit project(const FEVector& u, const BasisSet& basis, int m, const BandedSymMatrix& mass) {
  if (m < 1 || m > basis.dimension()) {
    throw std::out_of_range("project: m = " + std::to_string(m) + " outside [1, " +
                            std::to_string(basis.dimension()) + "]");
  }
  if (u.n_cells() != basis.n_cells) throw DimensionError("project: state and basis live on different meshes");
  const FEVector mu = multiply(mass, u);
  ModeSplit split{FEVector(build_mesh(basis.n_cells)), u, m};
  for (int k = 0; k < m; ++k) {
    const FEVector& w = basis.vectors[static_cast<std::size_t>(k)];
    double coeff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) coeff += w[i] * mu[i];
    split.y.axpy(coeff, w);
  }
  split.z = u - split.y;
  return split;
}

double energy_fraction(const BasisSet& basis, int m) {
  if (m < 1 || m > basis.dimension()) {
    throw std::out_of_range("energy_fraction: m = " + std::to_string(m) + " outside [1, " +
                            std::to_string(basis.dimension()) + "]");
  }
  const auto& ev = basis.eigenvalues;
  const double head = std::accumulate(ev.begin(), ev.begin() + m, 0.0);
  const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
  return head / total;
}

int modes_for_energy(const BasisSet& basis, double target) {
  for (int m = 1; m <= basis.dimension(); ++m) {
    if (energy_fraction(basis, m) >= target) return m;
  }
  return basis.dimension();
}

}  // namespace burgers
