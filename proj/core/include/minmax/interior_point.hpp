#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minmax/kkt.hpp"
#include "minmax/newton.hpp"

namespace minmax {

struct IpOptions {
  /// Tolerances, iteration cap and epsilon schedule.
  NewtonOptions newton;
  double b0 = 1.0;
  double sigma = 0.2;
  double b_min = 1e-9;
  double tau_ftb = 0.995;
  /// This many consecutive steps shorter than stall_alpha end the solve.
  double stall_alpha = 1e-8;
  int stall_limit = 3;
  /// An inequality counts as active when s_i < active_rel * (1 + ||s||_inf);
  /// its multiplier must then exceed lambda_active_min.
  double active_rel = 1e-6;
  double lambda_active_min = 1e-8;
  /// Every this many iterations, S^{1/2} J S^{1/2} is compared with the
  /// directly assembled unscaled matrix (0 disables the check).
  int verify_scaling_every = 10;

  void validate() const;
};

struct IpTraceRow {
  int iter = 0;
  double b = 0.0;
  double g_inf = 0.0;
  double alpha = 0.0;
  double eps_x = 0.0;
  double eps_y = 0.0;
  Inertia inertia;  // of J + E at the step
};

struct IpReport {
  SolveStatus status = SolveStatus::MaxIters;
  PrimalDualPoint z;
  double b = 0.0;
  int iters = 0;
  double g_inf = 0.0;
  bool singular_hessian = false;
  bool complementarity_ok = false;
  /// Iterations at which the instability branch was entered.
  int instability_activations = 0;
  bool instability_unattained = false;
  /// Iterations whose modification came from a fresh selection.
  int selections = 0;
  long factorizations = 0;
  /// Accepted steps whose slacks and inequality multipliers were checked.
  int positivity_checks = 0;
  double max_scaling_error = 0.0;
  Inertia final_inertia;
  /// Strictly-lower nonzeros of the last step's factor and of the first one.
  /// They differ when a cached elimination order was replaced mid-solve.
  Index nnz_factor = 0;
  Index nnz_factor_first = 0;
  std::string note;
  std::vector<IpTraceRow> trace;
};

/// Largest alpha <= 1 keeping (s, lambda) strictly positive, shortened by tau:
/// alpha = min(1, tau * max{a : (s, lambda) + a * (ds, dlambda) >= 0}).
double fraction_to_boundary(const PrimalDualPoint& z, const PrimalDualPoint& dz, double tau);

/// Starting iterate at (x0, y0): s = max(-F, 1), lambda = 1, nu = 0.
PrimalDualPoint initial_point(const MinmaxProblem& p, const Vec& x0, const Vec& y0);

/// One damped step z - alpha (J + E)^{-1} S^{-1} g(z, b). Throws StalledStep
/// when alpha < 1e-12 and SingularSystem when J + E has a zero pivot.
PrimalDualPoint ip_step(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                        const Modification& m, double tau = 0.995);

IpReport ip_solve(const MinmaxProblem& p, const PrimalDualPoint& z0, const IpOptions& opts = {});

void write_ip_trace(std::ostream& os, const IpReport& r);

}  // namespace minmax
