#pragma once

#include <cstdint>
#include <vector>

#include "minmax/ldlt.hpp"
#include "minmax/problem.hpp"

namespace minmax {

/// Residual, scaled matrix and modification at one iterate.
struct KktSystem {
  Dims dims;
  Vec g;
  /// Unmodified scaled matrix (symmetric), in primal-dual block order.
  SymMatrix jzz;
  /// Scaling diagonal: ones except s_x and s_y on the slack blocks.
  Vec s;
  double b = 0.0;
  Modification mod;
  /// Infinity norm of the Hessian-of-Lagrangian block; drives Gamma and tolerances.
  double hess_scale = 0.0;

  /// jzz + E for the stored modification.
  SymMatrix modified() const;
  SymMatrix modified(const Modification& m) const;
  /// The (y, s_y, nu_y, lambda_y) principal block of jzz.
  SymMatrix jyy() const;
};

Vec assemble_residual(const MinmaxProblem& p, const PrimalDualPoint& z, double b);
Vec assemble_residual(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                      const PointEval& ev);

/// Builds the scaled matrix and residual. Throws DomainViolation unless the
/// iterate is strictly interior.
KktSystem assemble_scaled_kkt(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                              const Modification& m);

/// The unscaled matrix H built directly from slacks and multipliers
/// (diag(lambda), sqrt(s) in place of lambda/s and the identity couplings).
SymMatrix assemble_unscaled_kkt(const MinmaxProblem& p, const PrimalDualPoint& z);

/// Diagonal of E: +eps_x on x, -eps_y on y, zero elsewhere.
Vec modification_diagonal(const Dims& d, const Modification& m);
/// Diagonal of E_y over the (y, s_y, nu_y, lambda_y) block: eps_y on y.
Vec modification_diagonal_yy(const Dims& d, double eps_y);

/// Gamma sign pattern for the full matrix:
/// + on (x, s_x), - on (y, s_y), + on (nu_y, lambda_y), - on (nu_x, lambda_x).
std::vector<std::int8_t> gamma_signs(const Dims& d);
std::vector<std::int8_t> gamma_signs_yy(const Dims& d);

/// Inertia required of J + E.
Inertia target_inertia(const Dims& d);
/// Inertia required of J_yy - E_y.
Inertia target_inertia_yy(const Dims& d);

}  // namespace minmax
