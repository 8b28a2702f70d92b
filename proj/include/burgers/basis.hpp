#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "burgers/fem.hpp"
#include "burgers/solver.hpp"

namespace burgers {

/// Row-major dense square matrix, used only inside the eigensolvers.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  double frobenius_norm() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  DenseMatrix vectors;         // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// 1e-14 ||A||_F. Rejects inputs with relative asymmetry above 1e-12.
EigenDecomposition jacobi_eigh(DenseMatrix a);

enum class BasisKind { Pod, Spectral };

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view text);

struct BasisSet {
  BasisKind kind = BasisKind::Pod;
  std::vector<FEVector> vectors;
  /// POD: energies, nonincreasing. Spectral: generalized eigenvalues of (K, M), ascending.
  std::vector<double> eigenvalues;
  double rank_tol = 0.0;
  int n_cells = 0;

  int dimension() const { return static_cast<int>(vectors.size()); }
};

struct ModeSplit {
  FEVector y;
  FEVector z;
  int m = 0;
};

/// Numerical-rank threshold n_s * eps used when no rank_tol is given.
double default_rank_tol(std::size_t n_snapshots);

/// POD of the snapshot states in the M inner product. Solves the spatial
/// symmetric problem G = (1/n_s) L^T S S^T L with M = L L^T and keeps modes with
/// lambda_k > rank_tol * lambda_1. The effective rank_tol is stored in the result.
BasisSet build_pod(const std::vector<FEVector>& states, const BandedSymMatrix& mass,
                   std::optional<double> rank_tol = std::nullopt);
BasisSet build_pod(const SnapshotSet& snaps, const BandedSymMatrix& mass,
                   std::optional<double> rank_tol = std::nullopt);

/// The `count` smallest generalized eigenpairs K w = lambda M w, M-orthonormal.
BasisSet build_spectral(const BandedSymMatrix& mass, const BandedSymMatrix& stiffness, int count);

/// y = sum_{k <= m} (u, w_k)_M w_k, z = u - y.
ModeSplit project(const FEVector& u, const BasisSet& basis, int m, const BandedSymMatrix& mass);

/// sum_{k <= m} lambda_k / sum_{k <= d} lambda_k.
double energy_fraction(const BasisSet& basis, int m);

/// Smallest m whose energy fraction reaches `target`.
int modes_for_energy(const BasisSet& basis, double target);

}  // namespace burgers
