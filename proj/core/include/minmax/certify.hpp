#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "minmax/problem.hpp"

namespace minmax {

/// One two-variable quadratic counterexample and what the modified Newton map
/// does at its equilibrium (0, 0).
struct CounterexampleCase {
  std::string label;
  Eigen::Matrix2d hessian;
  /// The modification that satisfies the inertia conditions yet gives the
  /// wrong stability verdict.
  Modification fooled;
  Eigen::Vector2cd fooled_eigs;
  /// What select_epsilons_unconstrained picks for the same Hessian.
  Modification selected;
  double selected_radius = 0.0;
};

struct CertificationReport {
  CounterexampleCase stable_non_minmax;  // 1.5x^2 - 4xy + y^2
  CounterexampleCase unstable_minmax;    // -0.25x^2 + xy - 0.5y^2
  std::vector<std::string> checks;       // one line per assertion, "ok ..." or "FAIL ..."
  bool passed = false;
  double seconds = 0.0;
};

/// Evaluates both counterexamples. Throws CertificationFailure listing the
/// failed checks unless every one holds; `report_only` returns instead.
CertificationReport certify_counterexamples(bool report_only = false);

}  // namespace minmax
