#include "burgers/solver.hpp"

#include <cmath>
#include <sstream>

namespace burgers {

namespace {

std::string format_value(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

NewtonError::NewtonError(long step, int iterations, double residual)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "Newton did not converge at step " << step << " after " << iterations
            << " iterations (residual " << residual << ")";
        return msg.str();
      }()),
      step_(step),
      iterations_(iterations),
      residual_(residual) {}

void CaseConfig::validate() const {
  if (n_cells < 2) throw ConfigError("n_cells: must be >= 2, got " + std::to_string(n_cells));
  if (!(nu > 0.0)) throw ConfigError("nu: must be > 0, got " + format_value(nu));
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0, got " + format_value(dt));
  if (!(T > 0.0)) throw ConfigError("T: must be > 0, got " + format_value(T));
  const double ratio = T / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("T/dt: T = " + format_value(T) + " is not an integer multiple of dt = " + format_value(dt));
  }
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol: must be > 0, got " + format_value(newton_tol));
  if (newton_max_iter < 1) {
    throw ConfigError("newton_max_iter: must be >= 1, got " + std::to_string(newton_max_iter));
  }
  if (snapshot_stride < 1) {
    throw ConfigError("snapshot_stride: must be >= 1, got " + std::to_string(snapshot_stride));
  }
  const auto steps = static_cast<long>(std::llround(ratio));
  if (steps % snapshot_stride != 0) {
    throw ConfigError("snapshot_stride: " + std::to_string(snapshot_stride) + " does not divide the step count " +
                      std::to_string(steps));
  }
  if (!forcing.empty() && forcing.size() != static_cast<std::size_t>(n_cells - 1)) {
    throw ConfigError("forcing: expected " + std::to_string(n_cells - 1) + " interior values, got " +
                      std::to_string(forcing.size()));
  }
}

long CaseConfig::num_steps() const { return static_cast<long>(std::llround(T / dt)); }

FEVector convection(const FEVector& u, const Mesh& mesh) {
  check_on_mesh(u, mesh, "convection");
  // Exact element integrals of u u_x phi_i for P1 data collapse to
  // N_i = (u_{i+1}^2 - u_{i-1}^2 + u_i (u_{i+1} - u_{i-1})) / 6.
  const int n = mesh.n_dof;
  FEVector out(mesh);
  for (int i = 0; i < n; ++i) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < n ? u[i + 1] : 0.0;
    out[i] = (up * up - um * um + u[i] * (up - um)) / 6.0;
  }
  return out;
}

Tridiagonal newton_jacobian(const FEVector& u, const Mesh& mesh) {
  check_on_mesh(u, mesh, "newton_jacobian");
  const int n = mesh.n_dof;
  Tridiagonal j(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < n ? u[i + 1] : 0.0;
    j.diagonal[i] = (up - um) / 6.0;
    if (i > 0) j.lower[i - 1] = -(2.0 * um + u[i]) / 6.0;
    if (i + 1 < n) j.upper[i] = (2.0 * up + u[i]) / 6.0;
  }
  return j;
}

StepOperators StepOperators::build(const CaseConfig& cfg) {
  cfg.validate();
  StepOperators ops{cfg.mesh(), {}, {}, {}};
  ops.mass = assemble_mass(ops.mesh);
  ops.stiffness = assemble_stiffness(ops.mesh);
  ops.mass_forcing = FEVector(ops.mesh);
  if (!cfg.forcing.empty()) ops.mass_forcing = multiply(ops.mass, FEVector(ops.mesh, cfg.forcing));
  return ops;
}

FEVector backward_euler_residual(const FEVector& u, const FEVector& u_old, const CaseConfig& cfg,
                                 const StepOperators& ops) {
  FEVector r = multiply(ops.mass, u - u_old);
  r *= 1.0 / cfg.dt;
  r.axpy(cfg.nu, multiply(ops.stiffness, u));
  r += convection(u, ops.mesh);
  r -= ops.mass_forcing;
  return r;
}

StepResult solve_step(const FEVector& u_old, const CaseConfig& cfg, const StepOperators& ops, long step_index) {
  check_on_mesh(u_old, ops.mesh, "solve_step");
  StepResult result{u_old, 0, 0.0};
  FEVector residual = backward_euler_residual(result.u, u_old, cfg, ops);
  result.residual = residual.max_abs();

  while (result.residual > cfg.newton_tol) {
    if (result.iterations == cfg.newton_max_iter) {
      throw NewtonError(step_index, result.iterations, result.residual);
    }
    Tridiagonal jac = newton_jacobian(result.u, ops.mesh);
    jac.add_scaled(1.0 / cfg.dt, ops.mass);
    jac.add_scaled(cfg.nu, ops.stiffness);
    const FEVector delta = solve_banded(jac, residual);
    result.u -= delta;
    ++result.iterations;
    residual = backward_euler_residual(result.u, u_old, cfg, ops);
    result.residual = residual.max_abs();
  }
  return result;
}

FEVector step_backward_euler(const FEVector& u_old, const CaseConfig& cfg, const BandedSymMatrix& mass,
                             const BandedSymMatrix& stiffness) {
  cfg.validate();
  StepOperators ops{cfg.mesh(), mass, stiffness, {}};
  ops.mass_forcing = cfg.forcing.empty() ? FEVector(ops.mesh) : multiply(mass, FEVector(ops.mesh, cfg.forcing));
  return solve_step(u_old, cfg, ops).u;
}

SnapshotSet run_case(const CaseConfig& cfg, const StepObserver& observer) {
  const StepOperators ops = StepOperators::build(cfg);
  const long steps = cfg.num_steps();

  SnapshotSet snaps;
  snaps.config = cfg;
  snaps.times.reserve(static_cast<std::size_t>(cfg.num_snapshots()));
  snaps.states.reserve(static_cast<std::size_t>(cfg.num_snapshots()));

  FEVector u = interpolate_step_ic(ops.mesh);
  snaps.times.push_back(0.0);
  snaps.states.push_back(u);

  for (long step = 1; step <= steps; ++step) {
    StepResult r = solve_step(u, cfg, ops, step);
    const double t = static_cast<double>(step) * cfg.dt;
    if (observer) observer(StepReport{step, t, r.iterations, r.residual, &u, &r.u});
    u = std::move(r.u);
    if (step % cfg.snapshot_stride == 0) {
      snaps.times.push_back(t);
      snaps.states.push_back(u);
    }
  }
  return snaps;
}

}  // namespace burgers
