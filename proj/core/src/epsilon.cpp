#include "minmax/epsilon.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

std::vector<std::int8_t> flipped(std::vector<std::int8_t> s, double sign) {
  if (sign < 0) {
    for (auto& v : s) v = static_cast<std::int8_t>(-v);
  }
  return s;
}

double block_norm(const SymMatrix& j, Index offset, Index size) {
  if (size == 0) return 0.0;
  return j.principal_block(offset, size).norm_inf();
}

[[noreturn]] void cap_exceeded(const char* side, double eps) {
  std::ostringstream msg;
  msg << "epsilon selection: " << side << " reached " << eps
      << " without meeting the inertia target";
  throw EpsilonCapExceeded(msg.str());
}

}  // namespace

void EpsilonOptions::validate() const {
  if (!(eps_growth > 1.0)) throw std::invalid_argument("eps_growth must exceed 1");
  if (!(start_factor > 0.0)) throw std::invalid_argument("eps start factor must be positive");
  if (eps_cap_steps < 1) throw std::invalid_argument("eps_cap_steps must be >= 1");
  for (const double mu : mu_grid) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu_grid values must lie in (0,1)");
  }
}

namespace {
constexpr double kMinScale = 1e-12;
}

InertiaOracle::InertiaOracle(const Dims& dims) : dims_(dims) {}

void InertiaOracle::set_scale(double scale) {
  // Relative below unit scale, so that curvature of a problem that is small
  // everywhere (f2's decaying tail) is not swamped by the regularization.
  // Capped above it: large multiplier curvature must not widen the band in
  // which genuine small eigenvalues of the constraint blocks count as zero.
  const double s = std::clamp(scale, kMinScale, 1.0);
  gamma_ = 1e-8 * s;
  zero_tol_ = 1e-11 * s;
}

LdltFactors InertiaOracle::factor_cached(const SymMatrix& j, const GammaPolicy& g,
                                         const Vec& shift,
                                         std::shared_ptr<const SymbolicAnalysis>& cache,
                                         int& futile) {
  FactorOptions fo;
  fo.zero_tol = zero_tol_;
  fo.shift = shift;
  fo.symbolic = cache;
  ++count_;
  std::optional<LdltFactors> f;
  std::exception_ptr failure;
  Index collapsed = j.size() + 1;
  try {
    f = ldlt_factor(j, g, fo);
    collapsed = f->collapsed_pivots();
    if (f->symbolic()) cache = f->symbolic();
  } catch (const FactorizationBreakdown&) {
    if (!j.is_sparse()) throw;
    failure = std::current_exception();
  }
  // The cached order was chosen on an earlier matrix; when it now produces
  // collapsed pivots, order again on the current values.
  if (collapsed > 0 && j.is_sparse() && futile < kMaxFutileReorders) {
    Vec total = shift;
    for (Index i = 0; i < j.size(); ++i) {
      total(i) += g.gamma * (g.signs[static_cast<size_t>(i)] < 0 ? -1.0 : 1.0);
    }
    fo.symbolic = symbolic_analyze(j.lower(), pivot_order(j, total));
    ++count_;
    try {
      LdltFactors again = ldlt_factor(j, g, fo);
      if (again.collapsed_pivots() < collapsed) {
        cache = again.symbolic();
        futile = 0;
        return again;
      }
    } catch (const FactorizationBreakdown&) {
    }
    ++futile;
  }
  if (!f) std::rethrow_exception(failure);
  return std::move(*f);
}

LdltFactors InertiaOracle::factor_full(const SymMatrix& j, const Vec& shift, double gamma_sign) {
  return factor_cached(j, GammaPolicy{flipped(gamma_signs(dims_), gamma_sign), gamma_}, shift,
                       sym_full_, futile_full_);
}

Inertia InertiaOracle::yy(const SymMatrix& j, const Vec& shift, double gamma_sign) {
  if (j.size() == 0) return Inertia{};
  return inertia(factor_cached(j, GammaPolicy{flipped(gamma_signs_yy(dims_), gamma_sign), gamma_},
                               shift, sym_yy_, futile_yy_));
}

bool InertiaOracle::full_matches(const SymMatrix& j, const Vec& shift, const Inertia& target) {
  return full(j, shift, 1.0) == target && full(j, shift, -1.0) == target;
}

bool InertiaOracle::yy_matches(const SymMatrix& j, const Vec& shift, const Inertia& target) {
  return yy(j, shift, 1.0) == target && yy(j, shift, -1.0) == target;
}

bool InertiaOracle::near_singular(const SymMatrix& j) {
  const Vec zero = Vec::Zero(j.size());
  if (inertia(factor_full(j, zero, 1.0)) != inertia(factor_full(j, zero, -1.0))) return true;
  const BlockLayout at(dims_);
  const SymMatrix jyy = j.principal_block(at.yy_offset(), at.yy_size());
  const Vec zyy = Vec::Zero(jyy.size());
  return yy(jyy, zyy, 1.0) != yy(jyy, zyy, -1.0);
}

bool lqac_holds(const SymMatrix& jzz, const Modification& m, InertiaOracle& oracle) {
  const Dims& d = oracle.dims();
  const BlockLayout at(d);
  const SymMatrix jyy = jzz.principal_block(at.yy_offset(), at.yy_size());
  if (!oracle.yy_matches(jyy, -modification_diagonal_yy(d, m.eps_y), target_inertia_yy(d))) {
    return false;
  }
  return oracle.full_matches(jzz, modification_diagonal(d, m), target_inertia(d));
}

EpsilonSelection select_epsilons(const SymMatrix& jzz, const EpsilonOptions& opts,
                                 InertiaOracle& oracle) {
  const Dims& d = oracle.dims();
  const BlockLayout at(d);
  const Inertia target = target_inertia(d);
  const Inertia target_yy = target_inertia_yy(d);
  const SymMatrix jyy = jzz.principal_block(at.yy_offset(), at.yy_size());
  auto full_ok = [&](double ex, double ey) {
    return oracle.full_matches(jzz, modification_diagonal(d, Modification{ex, ey}), target);
  };
  auto yy_ok = [&](double ey) {
    return oracle.yy_matches(jyy, -modification_diagonal_yy(d, ey), target_yy);
  };

  EpsilonSelection sel;
  const bool full_at_zero = full_ok(0.0, 0.0);
  const bool yy_at_zero = yy_ok(0.0);
  if (yy_at_zero && full_at_zero) {
    sel.inertia = oracle.full(jzz, Vec::Zero(jzz.size()));
    return sel;
  }

  double ey = 0.0;
  if (!yy_at_zero) {
    ey = opts.start_factor * (1.0 + block_norm(jzz, at.y, d.ny));
    for (int step = 0;; ++step) {
      if (yy_ok(ey)) break;
      if (step >= opts.eps_cap_steps) cap_exceeded("eps_y", ey);
      ey *= opts.eps_growth;
      ++sel.growth_steps;
    }
  }

  const double start_x = opts.start_factor * (1.0 + block_norm(jzz, at.x, d.nx));
  double ex = 0.0;
  if (!full_ok(ex, ey)) {
    ex = start_x;
    for (int step = 0;; ++step) {
      if (full_ok(ex, ey)) break;
      if (step >= opts.eps_cap_steps) cap_exceeded("eps_x", ex);
      ex *= opts.eps_growth;
      ++sel.growth_steps;
    }
  }

  if (opts.enforce_instability && full_at_zero) {
    sel.instability_branch = true;
    double trial = ex > 0.0 ? ex : start_x;
    bool attained = false;
    for (int step = 0; step <= opts.eps_cap_steps && !attained; ++step) {
      if (full_ok(trial, ey)) {
        for (const double mu : opts.mu_grid) {
          if (!full_ok(mu * trial, mu * ey)) {
            attained = true;
            break;
          }
        }
      }
      if (attained) {
        ex = trial;
      } else {
        trial *= opts.eps_growth;
        ++sel.growth_steps;
      }
    }
    sel.instability_unattained = !attained;
  }

  sel.mod = Modification{ex, ey};
  sel.inertia = oracle.full(jzz, modification_diagonal(d, sel.mod));
  return sel;
}

EpsilonSelection select_epsilons_unconstrained(const SymMatrix& hzz, const Dims& dims,
                                               const EpsilonOptions& opts) {
  if (!dims.unconstrained()) {
    throw std::invalid_argument("select_epsilons_unconstrained: problem has constraints");
  }
  InertiaOracle oracle(dims);
  oracle.set_scale(hzz.norm_inf());
  return select_epsilons(hzz, opts, oracle);
}

EpsilonSelection select_epsilons_constrained(const KktSystem& k, const EpsilonOptions& opts) {
  InertiaOracle oracle(k.dims);
  oracle.set_scale(k.hess_scale);
  return select_epsilons(k.jzz, opts, oracle);
}

InertiaVerdict inertia_verdict(const SymMatrix& jzz, InertiaOracle& oracle) {
  const Dims& d = oracle.dims();
  const BlockLayout at(d);
  InertiaVerdict v;
  const SymMatrix jyy = jzz.principal_block(at.yy_offset(), at.yy_size());
  v.full = oracle.full(jzz, Vec::Zero(jzz.size()));
  v.yy = oracle.yy(jyy, Vec::Zero(jyy.size()));
  v.targets_hold = v.full == target_inertia(d) && v.yy == target_inertia_yy(d);
  v.near_singular = oracle.near_singular(jzz);
  return v;
}

}  // namespace minmax
