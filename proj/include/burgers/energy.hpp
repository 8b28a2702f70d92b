#pragma once

#include <optional>
#include <span>
#include <vector>

#include "burgers/basis.hpp"
#include "burgers/fem.hpp"
#include "burgers/solver.hpp"

namespace burgers {

/// Inter-mode transfer terms for u = y + z:
///   e_up = -b(y, y, z), e_down = -b(z, z, y), e_m = e_up - e_down,
///   E_m = -nu (y_x, z_x).
/// With these signs the resolved-energy balance reads
///   1/2 d/dt |y|^2 + nu |y_x|^2 = E_m - e_m + (f, y).
struct PointwiseBudget {
  double e_up = 0.0;
  double e_down = 0.0;
  double e_m = 0.0;
  double E_m = 0.0;
};

struct EnergySeries {
  int m = 0;
  double T = 0.0;
  int n = 0;  // subintervals; n + 1 nodes
  std::vector<double> times;
  std::vector<double> e_up;
  std::vector<double> e_down;
  std::vector<double> e_m;
  std::vector<double> E_m;
  /// ||y||_K ||z||_K at every node, the natural scale of E_m.
  std::vector<double> yz_stiffness_scale;
};

struct AveragedBudget {
  int m = 0;
  double avg_e_m = 0.0;
  double avg_E_m = 0.0;
  double avg_sum = 0.0;
  double T = 0.0;
  int n = 0;
  double dt = 0.0;
  int d = 0;
};

/// Shared operators for evaluating budgets on one mesh.
struct BudgetContext {
  Mesh mesh;
  BandedSymMatrix mass;
  BandedSymMatrix stiffness;
  double nu = 0.0;

  static BudgetContext build(int n_cells, double nu);
};

PointwiseBudget pointwise_budget(const FEVector& u, const BasisSet& basis, int m, const BudgetContext& ctx);
PointwiseBudget pointwise_budget(const FEVector& u, const BasisSet& basis, int m, const CaseConfig& cfg);

/// (1 / 2n) sum_{i=1}^{n} (v_i + v_{i+1}); `values` must hold n + 1 samples.
double trapezoid_average(std::span<const double> values, int n);

/// Evaluates the budget at t_i = i T / n, i = 0..n. Every node must coincide
/// (to 1e-9) with a recorded snapshot time; `T` defaults to the run's end time.
EnergySeries build_series(const SnapshotSet& snaps, const BasisSet& basis, int m, int n);
EnergySeries build_series(const SnapshotSet& snaps, const BasisSet& basis, int m, int n, double T);

AveragedBudget averaged_budget(const EnergySeries& series, double dt = 0.0, int d = 0);

struct TableOptions {
  BasisKind basis_kind = BasisKind::Pod;
  /// Relative POD cutoff; empty means default_rank_tol(n_s).
  std::optional<double> rank_tol;
  /// Build the POD only from snapshots at quadrature nodes instead of every recorded state.
  bool pod_from_quadrature_nodes = false;
  /// Spectral basis size; 0 means n_dof.
  int spectral_count = 0;
  std::vector<int> m_list;
  int n = 0;
  int jobs = 1;
};

struct TableResult {
  BasisSet basis;
  std::vector<AveragedBudget> rows;
};

/// Basis selected by `options` for the given trajectory.
BasisSet build_table_basis(const SnapshotSet& snaps, const TableOptions& options);

/// Averages for every m in options.m_list over [0, T] against a fixed basis.
std::vector<AveragedBudget> budget_rows(const SnapshotSet& snaps, const BasisSet& basis, const TableOptions& options,
                                        double T);

/// DNS -> basis -> series -> averages for every m in options.m_list.
TableResult run_table(const CaseConfig& cfg, const TableOptions& options);
/// Same pipeline on an existing trajectory.
TableResult run_table(const SnapshotSet& snaps, const TableOptions& options);

/// Averages over [0, T'] for each T' in `intervals`, using every recorded
/// snapshot in that window (n = T' / (dt * stride)) and one shared basis.
struct IntervalTable {
  double T = 0.0;
  int n = 0;
  std::vector<AveragedBudget> rows;
};
std::vector<IntervalTable> interval_tables(const SnapshotSet& snaps, const BasisSet& basis,
                                           const std::vector<int>& m_list, const std::vector<double>& intervals,
                                           int jobs = 1);

/// Snapshots recorded at the quadrature nodes t_i = i T / n.
std::vector<FEVector> quadrature_states(const SnapshotSet& snaps, int n, double T);

}  // namespace burgers
