#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "burgers/fem.hpp"

namespace burgers {

/// Raised for an inconsistent CaseConfig; the message names the offending field(s).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when Newton's method fails to reach the residual tolerance.
class NewtonError : public std::runtime_error {
 public:
  NewtonError(long step, int iterations, double residual);

  long step() const { return step_; }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  long step_;
  int iterations_;
  double residual_;
};

struct CaseConfig {
  int n_cells = 128;
  double nu = 1e-2;
  double T = 1.0;
  double dt = 1e-2;
  /// Nodal forcing on interior nodes; empty means f = 0.
  std::vector<double> forcing;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int snapshot_stride = 1;

  /// Throws ConfigError unless every invariant holds.
  void validate() const;

  /// round(T / dt); valid only after validate().
  long num_steps() const;
  long num_snapshots() const { return num_steps() / snapshot_stride + 1; }
  Mesh mesh() const { return build_mesh(n_cells); }
};

struct SnapshotSet {
  std::vector<double> times;
  std::vector<FEVector> states;
  CaseConfig config;

  std::size_t size() const { return states.size(); }
};

/// N(u)_i = b(u, u, phi_i), the Galerkin convection term.
FEVector convection(const FEVector& u, const Mesh& mesh);

/// Analytic derivative of convection(u) with respect to u.
Tridiagonal newton_jacobian(const FEVector& u, const Mesh& mesh);

/// Backward Euler operators that stay fixed over a run.
struct StepOperators {
  Mesh mesh;
  BandedSymMatrix mass;
  BandedSymMatrix stiffness;
  FEVector mass_forcing;  // M f

  static StepOperators build(const CaseConfig& cfg);
};

struct StepResult {
  FEVector u;
  int iterations = 0;
  double residual = 0.0;
};

/// Residual of M(u - u_old)/dt + nu K u + N(u) - M f.
FEVector backward_euler_residual(const FEVector& u, const FEVector& u_old, const CaseConfig& cfg,
                                 const StepOperators& ops);

/// One backward Euler step solved by Newton from the guess u_old.
/// `step_index` only labels a NewtonError.
StepResult solve_step(const FEVector& u_old, const CaseConfig& cfg, const StepOperators& ops,
                      long step_index = 0);

FEVector step_backward_euler(const FEVector& u_old, const CaseConfig& cfg, const BandedSymMatrix& mass,
                             const BandedSymMatrix& stiffness);

struct StepReport {
  long step = 0;
  double time = 0.0;
  int iterations = 0;
  double residual = 0.0;
  const FEVector* u_old = nullptr;
  const FEVector* u_new = nullptr;
};

using StepObserver = std::function<void(const StepReport&)>;

/// Integrates from the step initial condition to T, recording every
/// snapshot_stride-th state including t = 0 and t = T.
SnapshotSet run_case(const CaseConfig& cfg, const StepObserver& observer = {});

}  // namespace burgers
