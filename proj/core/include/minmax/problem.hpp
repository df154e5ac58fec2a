#pragma once

#include <functional>
#include <string>
#include <vector>

#include "minmax/sym_matrix.hpp"

namespace minmax {

using Vec = Eigen::VectorXd;

/// Variable and constraint counts. The x side minimizes, the y side maximizes;
/// l counts equalities and m counts inequalities of each side.
struct Dims {
  Index nx = 0;
  Index ny = 0;
  Index lx = 0;
  Index ly = 0;
  Index mx = 0;
  Index my = 0;

  bool minimization() const { return ny == 0 && ly == 0 && my == 0; }
  bool unconstrained() const { return lx == 0 && ly == 0 && mx == 0 && my == 0; }
  /// Length of the primal-dual vector.
  Index total() const { return nx + mx + ny + my + ly + my + lx + mx; }
  void validate() const;
};

/// Offsets of each block inside the primal-dual vector
/// (x, s_x, y, s_y, nu_y, lambda_y, nu_x, lambda_x).
struct BlockLayout {
  explicit BlockLayout(const Dims& d);

  Index x = 0, sx = 0, y = 0, sy = 0, nu_y = 0, lam_y = 0, nu_x = 0, lam_x = 0;
  Index n = 0;

  /// The (y, s_y, nu_y, lambda_y) principal block.
  Index yy_offset() const { return y; }
  Index yy_size() const { return nu_x - y; }
};

/// Constraint values together with their Jacobian. Jacobian rows index
/// constraints; columns index x first and then y.
struct ConstraintEval {
  Vec value;
  std::vector<Triplet> jacobian;
};

struct MultiplierView {
  const Vec& nu_y;
  const Vec& lambda_y;
  const Vec& nu_x;
  const Vec& lambda_x;
};

/// A minmax problem  min_x max_y f(x, y)  subject to
///   G_x(x) = 0, F_x(x) <= 0, G_y(x, y) = 0, F_y(x, y) <= 0.
/// Hessian callbacks return lower-triangle triplets over the stacked (x, y)
/// coordinates. Callbacks must be pure.
struct MinmaxProblem {
  std::string name;
  Dims dims;

  std::function<double(const Vec& x, const Vec& y)> objective;
  std::function<void(const Vec& x, const Vec& y, Vec& gx, Vec& gy)> gradient;
  std::function<std::vector<Triplet>(const Vec& x, const Vec& y)> hessian;

  std::function<ConstraintEval(const Vec& x)> eq_x;
  std::function<ConstraintEval(const Vec& x)> ineq_x;
  std::function<ConstraintEval(const Vec& x, const Vec& y)> eq_y;
  std::function<ConstraintEval(const Vec& x, const Vec& y)> ineq_y;

  /// Hessian over (x, y) of  nu_x'G_x + lambda_x'F_x + nu_y'G_y - lambda_y'F_y.
  /// May be empty when every constraint is affine.
  std::function<std::vector<Triplet>(const Vec& x, const Vec& y, const MultiplierView& m)>
      constraint_curvature;

  /// Throws CallbackFailure when a required callback is missing.
  void validate() const;
};

/// Full primal-dual iterate.
struct PrimalDualPoint {
  Vec x, sx, y, sy, nu_y, lambda_y, nu_x, lambda_x;

  static PrimalDualPoint zeros(const Dims& d);
  Vec to_vector() const;
  static PrimalDualPoint from_vector(const Dims& d, const Vec& v);
  /// Throws DomainViolation unless every slack and inequality multiplier is > 0.
  void require_interior() const;
  bool interior() const;
};

/// Hessian modification weights.
struct Modification {
  double eps_x = 0.0;
  double eps_y = 0.0;

  friend bool operator==(const Modification&, const Modification&) = default;
};

/// Problem-data evaluations at one point, shared between residual and matrix
/// assembly so that callbacks run once per iterate.
struct PointEval {
  Vec gx, gy;
  std::vector<Triplet> hess;  // f plus constraint curvature, lower triangle over (x, y)
  ConstraintEval eq_x, ineq_x, eq_y, ineq_y;
  /// Infinity norm (bounded above) of the Hessian-of-Lagrangian block.
  double hess_scale = 0.0;
};

PointEval evaluate_point(const MinmaxProblem& p, const PrimalDualPoint& z);

}  // namespace minmax
