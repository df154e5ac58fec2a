#pragma once

#include <string>
#include <vector>

#include "minmax/problem.hpp"

namespace minmax {

struct FdMismatch {
  std::string block;  // "grad", "hess", "G_x", ..., "curvature"
  Index row = 0;
  Index col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct FdReport {
  double max_rel_error = 0.0;
  /// Worst entries first, at most FdOptions::keep_worst of them.
  std::vector<FdMismatch> worst;
  bool passed = false;
};

struct FdOptions {
  double step = 1e-5;
  double tol = 1e-5;
  std::size_t keep_worst = 5;
};

/// Compares analytic derivatives with central differences at z: the gradient
/// against f, the Hessian against the gradient, constraint Jacobians against
/// constraint values, and constraint curvature against the multiplier-weighted
/// Jacobians. Errors are |a - n| / max(1, |n|).
FdReport fd_check(const MinmaxProblem& p, const PrimalDualPoint& z, const FdOptions& opts = {});

}  // namespace minmax
