#include "burgers/energy.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace burgers {

BudgetContext BudgetContext::build(int n_cells, double nu) {
  BudgetContext ctx{build_mesh(n_cells), {}, {}, nu};
  ctx.mass = assemble_mass(ctx.mesh);
  ctx.stiffness = assemble_stiffness(ctx.mesh);
  return ctx;
}

namespace {

PointwiseBudget budget_of_split(const ModeSplit& split, const BudgetContext& ctx) {
  PointwiseBudget b;
  b.e_up = -trilinear(split.y, split.y, split.z, ctx.mesh);
  b.e_down = -trilinear(split.z, split.z, split.y, ctx.mesh);
  b.e_m = b.e_up - b.e_down;
  b.E_m = -ctx.nu * inner(split.y, split.z, ctx.stiffness);
  return b;
}

// Index of the recorded snapshot at time t, or -1.
long find_snapshot(const SnapshotSet& snaps, double t) {
  const auto it = std::lower_bound(snaps.times.begin(), snaps.times.end(), t - 1e-9);
  if (it == snaps.times.end() || std::abs(*it - t) > 1e-9) return -1;
  return static_cast<long>(it - snaps.times.begin());
}

std::vector<long> quadrature_indices(const SnapshotSet& snaps, int n, double T) {
  if (n < 1) throw std::invalid_argument("quadrature: n must be >= 1, got " + std::to_string(n));
  std::vector<long> idx(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(n);
    const long k = find_snapshot(snaps, t);
    if (k < 0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "quadrature node " << i << " at t = " << t << " does not coincide with a recorded snapshot";
      throw std::invalid_argument(msg.str());
    }
    idx[static_cast<std::size_t>(i)] = k;
  }
  return idx;
}

}  // namespace

PointwiseBudget pointwise_budget(const FEVector& u, const BasisSet& basis, int m, const BudgetContext& ctx) {
  return budget_of_split(project(u, basis, m, ctx.mass), ctx);
}

PointwiseBudget pointwise_budget(const FEVector& u, const BasisSet& basis, int m, const CaseConfig& cfg) {
  return pointwise_budget(u, basis, m, BudgetContext::build(cfg.n_cells, cfg.nu));
}

double trapezoid_average(std::span<const double> values, int n) {
  if (n < 1 || values.size() != static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("trapezoid_average: expected n + 1 = " + std::to_string(n + 1) + " values, got " +
                                std::to_string(values.size()));
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += values[i] + values[i + 1];
  return s / (2.0 * n);
}

EnergySeries build_series(const SnapshotSet& snaps, const BasisSet& basis, int m, int n) {
  return build_series(snaps, basis, m, n, snaps.config.T);
}

EnergySeries build_series(const SnapshotSet& snaps, const BasisSet& basis, int m, int n, double T) {
  if (m < 1 || m > basis.dimension()) {
    throw std::out_of_range("build_series: m = " + std::to_string(m) + " outside [1, " +
                            std::to_string(basis.dimension()) + "]");
  }
  const std::vector<long> idx = quadrature_indices(snaps, n, T);
  const BudgetContext ctx = BudgetContext::build(snaps.config.n_cells, snaps.config.nu);

  EnergySeries s;
  s.m = m;
  s.T = T;
  s.n = n;
  const auto count = idx.size();
  s.times.reserve(count);
  s.e_up.reserve(count);
  s.e_down.reserve(count);
  s.e_m.reserve(count);
  s.E_m.reserve(count);
  s.yz_stiffness_scale.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const FEVector& u = snaps.states[static_cast<std::size_t>(idx[i])];
    const ModeSplit split = project(u, basis, m, ctx.mass);
    const PointwiseBudget b = budget_of_split(split, ctx);
    s.times.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    s.e_up.push_back(b.e_up);
    s.e_down.push_back(b.e_down);
    s.e_m.push_back(b.e_m);
    s.E_m.push_back(b.E_m);
    s.yz_stiffness_scale.push_back(
        std::sqrt(std::max(0.0, inner(split.y, split.y, ctx.stiffness)) *
                  std::max(0.0, inner(split.z, split.z, ctx.stiffness))));
  }
  return s;
}

AveragedBudget averaged_budget(const EnergySeries& series, double dt, int d) {
  AveragedBudget a;
  a.m = series.m;
  a.avg_e_m = trapezoid_average(series.e_m, series.n);
  a.avg_E_m = trapezoid_average(series.E_m, series.n);
  a.avg_sum = a.avg_e_m + a.avg_E_m;
  a.T = series.T;
  a.n = series.n;
  a.dt = dt;
  a.d = d;
  return a;
}

std::vector<FEVector> quadrature_states(const SnapshotSet& snaps, int n, double T) {
  std::vector<FEVector> out;
  for (long k : quadrature_indices(snaps, n, T)) out.push_back(snaps.states[static_cast<std::size_t>(k)]);
  return out;
}

BasisSet build_table_basis(const SnapshotSet& snaps, const TableOptions& options) {
  const Mesh mesh = build_mesh(snaps.config.n_cells);
  const BandedSymMatrix mass = assemble_mass(mesh);
  if (options.basis_kind == BasisKind::Spectral) {
    const int count = options.spectral_count > 0 ? options.spectral_count : mesh.n_dof;
    return build_spectral(mass, assemble_stiffness(mesh), count);
  }
  if (options.pod_from_quadrature_nodes) {
    return build_pod(quadrature_states(snaps, options.n, snaps.config.T), mass, options.rank_tol);
  }
  return build_pod(snaps, mass, options.rank_tol);
}

std::vector<AveragedBudget> budget_rows(const SnapshotSet& snaps, const BasisSet& basis, const TableOptions& options,
                                        double T) {
  for (int m : options.m_list) {
    if (m < 1 || m > basis.dimension()) {
      throw std::out_of_range("m = " + std::to_string(m) + " outside the retained basis range [1, " +
                              std::to_string(basis.dimension()) + "]");
    }
  }
  auto row = [&](int m) {
    return averaged_budget(build_series(snaps, basis, m, options.n, T), snaps.config.dt, basis.dimension());
  };

  std::vector<AveragedBudget> rows(options.m_list.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  for (std::size_t start = 0; start < rows.size(); start += jobs) {
    const std::size_t stop = std::min(rows.size(), start + jobs);
    if (jobs == 1) {
      rows[start] = row(options.m_list[start]);
      continue;
    }
    std::vector<std::future<AveragedBudget>> pending;
    for (std::size_t i = start; i < stop; ++i) pending.push_back(std::async(std::launch::async, row, options.m_list[i]));
    for (std::size_t i = start; i < stop; ++i) rows[i] = pending[i - start].get();
  }
  return rows;
}

std::vector<IntervalTable> interval_tables(const SnapshotSet& snaps, const BasisSet& basis,
                                           const std::vector<int>& m_list, const std::vector<double>& intervals,
                                           int jobs) {
  const double spacing = snaps.config.dt * snaps.config.snapshot_stride;
  std::vector<IntervalTable> out;
  for (double t_end : intervals) {
    const double steps = t_end / spacing;
    if (!(t_end > 0.0) || t_end > snaps.config.T * (1.0 + 1e-12) || std::abs(steps - std::round(steps)) > 1e-6) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "interval T' = " << t_end << " is not a multiple of the snapshot spacing " << spacing
          << " within (0, " << snaps.config.T << "]";
      throw std::invalid_argument(msg.str());
    }
    TableOptions options;
    options.m_list = m_list;
    options.n = static_cast<int>(std::llround(steps));
    options.jobs = jobs;
    out.push_back({t_end, options.n, budget_rows(snaps, basis, options, t_end)});
  }
  return out;
}

TableResult run_table(const SnapshotSet& snaps, const TableOptions& options) {
  TableResult result;
  result.basis = build_table_basis(snaps, options);
  result.rows = budget_rows(snaps, result.basis, options, snaps.config.T);
  return result;
}

TableResult run_table(const CaseConfig& cfg, const TableOptions& options) {
  return run_table(run_case(cfg), options);
}

}  // namespace burgers
