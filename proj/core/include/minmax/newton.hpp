#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "minmax/epsilon.hpp"
#include "minmax/problem.hpp"

namespace minmax {

enum class SolveStatus {
  LocalMinmax,
  EquilibriumNotMinmax,
  MaxIters,
  Diverged,
  SingularFailure,
  InfeasibleStart,
};

const char* to_string(SolveStatus s);
/// Parses the names produced by to_string; throws std::invalid_argument.
SolveStatus parse_status(const std::string& s);

struct NewtonOptions {
  double delta_s = 1e-5;
  double delta_eps = 1e-3;
  int max_iters = 500;
  EpsilonOptions eps;
  /// Iterates with ||(x, y)||_inf above this are reported as Diverged.
  double divergence_threshold = 1e8;
  /// Keep per-iteration rows in the report.
  bool record_trace = false;

  void validate() const;
};

struct NewtonTraceRow {
  int iter = 0;
  double grad_inf = 0.0;
  double eps_x = 0.0;
  double eps_y = 0.0;
  double step_norm = 0.0;
};

struct NewtonReport {
  SolveStatus status = SolveStatus::MaxIters;
  Vec x, y;
  int iters = 0;
  double grad_inf = 0.0;
  /// Set when the terminal Hessian has an eigenvalue within Gamma of zero
  /// (for example f = xy, whose y block is identically zero).
  bool singular_hessian = false;
  /// Some iteration could not reach the instability target and kept the
  /// plain LQAC modification.
  bool instability_unattained = false;
  Inertia final_inertia;
  /// Why a failure status was reported, empty otherwise.
  std::string note;
  std::vector<NewtonTraceRow> trace;
};

/// The Hessian of f over (x, y) as a symmetric matrix.
SymMatrix hessian_matrix(const MinmaxProblem& p, const Vec& x, const Vec& y);

/// (x, y) - (H + E)^{-1} (grad_x f; grad_y f). Throws SingularSystem when
/// H + E has a zero pivot.
std::pair<Vec, Vec> newton_step(const MinmaxProblem& p, const Vec& x, const Vec& y,
                                const Modification& m);

/// Modified Newton iteration with epsilon re-selection away from equilibria and
/// frozen (or zero) modification inside the delta_eps neighbourhood.
NewtonReport newton_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                          const NewtonOptions& opts = {});

enum class Classification { LocalMinmax, Other };

struct ClassifyResult {
  Classification kind = Classification::Other;
  bool singular_hessian = false;
};

/// Second-order test at a stationary point: the y block must be negative
/// definite and the full Hessian must have inertia (n_x, n_y, 0). A Hessian
/// with an eigenvalue within Gamma of zero is reported as Other with the
/// singular flag set.
ClassifyResult classify_equilibrium(const MinmaxProblem& p, const Vec& x, const Vec& y);

/// Inertias of the Hessian and of its y block at (x, y), with the singular flag.
InertiaVerdict equilibrium_verdict(const MinmaxProblem& p, const Vec& x, const Vec& y);

/// eps_x - lambda_max(eps_y * H_xy H_yy^{-2} H_yx). Nonnegative values certify
/// the stability condition at a local minmax. Throws SingularSystem when the
/// y block is singular.
double stability_margin_diagnostic(const MinmaxProblem& p, const Vec& x, const Vec& y,
                                   const Modification& m);

/// I - (H + E)^{-1} H, the linearization of the modified Newton map.
Eigen::MatrixXd iteration_jacobian(const Eigen::MatrixXd& h, const Dims& dims,
                                   const Modification& m);

void write_newton_trace(std::ostream& os, const NewtonReport& r);

namespace detail {
/// Shared loop for the modified and the unmodified (eps = 0) iteration.
NewtonReport newton_iterate(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                            const NewtonOptions& opts, bool modify);
}  // namespace detail

}  // namespace minmax
