#pragma once

#include <memory>
#include <vector>

#include "minmax/kkt.hpp"
#include "minmax/ldlt.hpp"

namespace minmax {

struct EpsilonOptions {
  /// Multiplicative growth applied at each step.
  double eps_growth = 10.0;
  /// Each side starts at start_factor * (1 + ||its Hessian block||_inf).
  double start_factor = 1e-3;
  int eps_cap_steps = 40;
  std::vector<double> mu_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  /// Run the extra eps_x growth that makes non-minmax equilibria unstable.
  bool enforce_instability = true;

  void validate() const;
};

/// Factors and counts inertias of the full matrix and of its
/// (y, s_y, nu_y, lambda_y) block, with Gamma signed per block and the
/// symbolic analysis of each pattern cached across calls. A cached order that
/// starts producing collapsed pivots is replaced by one computed on the
/// current values (given up after a few reorders that do not help).
class InertiaOracle {
 public:
  explicit InertiaOracle(const Dims& dims);

  /// Gamma = 1e-8 * scale and zero tolerance = 1e-11 * scale, where scale is
  /// the infinity norm of the Hessian-of-Lagrangian block clamped to [1e-12, 1].
  void set_scale(double scale);
  double gamma() const { return gamma_; }
  double zero_tol() const { return zero_tol_; }

  LdltFactors factor_full(const SymMatrix& j, const Vec& shift, double gamma_sign = 1.0);
  Inertia full(const SymMatrix& j, const Vec& shift, double gamma_sign = 1.0) {
    return inertia(factor_full(j, shift, gamma_sign));
  }
  Inertia yy(const SymMatrix& j, const Vec& shift, double gamma_sign = 1.0);

  /// The target inertia holds with Gamma of either sign. An eigenvalue within
  /// Gamma of zero therefore never passes as having the wanted sign.
  bool full_matches(const SymMatrix& j, const Vec& shift, const Inertia& target);
  bool yy_matches(const SymMatrix& j, const Vec& shift, const Inertia& target);

  /// True when flipping the sign of Gamma changes the inertia of the full
  /// matrix or of its y block, meaning an eigenvalue sits within Gamma of zero.
  bool near_singular(const SymMatrix& j);

  long factorizations() const { return count_; }
  const Dims& dims() const { return dims_; }

 private:
  static constexpr int kMaxFutileReorders = 3;

  LdltFactors factor_cached(const SymMatrix& j, const GammaPolicy& g, const Vec& shift,
                            std::shared_ptr<const SymbolicAnalysis>& cache, int& futile);

  Dims dims_;
  double gamma_ = 1e-8;
  double zero_tol_ = 1e-11;
  std::shared_ptr<const SymbolicAnalysis> sym_full_;
  std::shared_ptr<const SymbolicAnalysis> sym_yy_;
  int futile_full_ = 0;
  int futile_yy_ = 0;
  long count_ = 0;
};

struct EpsilonSelection {
  Modification mod;
  /// Inertia of J + E at the returned modification.
  Inertia inertia;
  /// The unmodified matrix already had the target inertia, so eps_x was grown
  /// further to make the point repelling.
  bool instability_branch = false;
  /// The instability growth hit the step cap without finding a mu that breaks
  /// the target inertia; the plain LQAC values were kept.
  bool instability_unattained = false;
  int growth_steps = 0;
};

/// Whether both inertia conditions hold for J with modification m, robustly
/// with respect to the sign of Gamma.
bool lqac_holds(const SymMatrix& jzz, const Modification& m, InertiaOracle& oracle);

/// Epsilon selection on the scaled matrix J (unconstrained: the Hessian).
/// Throws EpsilonCapExceeded when the inertia targets cannot be reached.
EpsilonSelection select_epsilons(const SymMatrix& jzz, const EpsilonOptions& opts,
                                 InertiaOracle& oracle);

EpsilonSelection select_epsilons_unconstrained(const SymMatrix& hzz, const Dims& dims,
                                               const EpsilonOptions& opts);
EpsilonSelection select_epsilons_constrained(const KktSystem& k, const EpsilonOptions& opts);

/// Classification of an equilibrium by the inertia targets with no modification.
struct InertiaVerdict {
  bool targets_hold = false;
  bool near_singular = false;
  Inertia full;
  Inertia yy;

  bool strict() const { return targets_hold && !near_singular; }
};

InertiaVerdict inertia_verdict(const SymMatrix& jzz, InertiaOracle& oracle);

}  // namespace minmax
