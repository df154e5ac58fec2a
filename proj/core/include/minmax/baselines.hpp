#pragma once

#include "minmax/newton.hpp"

namespace minmax {

struct GdaOptions {
  double alpha_x = 0.05;
  double alpha_y = 0.05;
  int max_iters = 50000;
  double delta_s = 1e-5;
  double divergence_threshold = 1e8;
  bool record_trace = false;

  void validate() const;
};

/// Newton's iteration with no Hessian modification. Stops with
/// SingularFailure when the Hessian is singular to working precision.
NewtonReport pure_newton_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                               const NewtonOptions& opts = {});

/// Simultaneous gradient descent on x and ascent on y with fixed steps.
NewtonReport gda_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                       const GdaOptions& opts = {});

}  // namespace minmax
