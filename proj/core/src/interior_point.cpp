#include "minmax/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void ratio_limit(const Vec& v, const Vec& dv, double& amax) {
  for (Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) amax = std::min(amax, -v(i) / dv(i));
  }
}

// Largest relative mismatch between S^{1/2} J S^{1/2} and H.
double scaling_error(const SymMatrix& j, const SymMatrix& h, const Vec& s) {
  const Vec r = s.cwiseSqrt();
  double worst = 0.0;
  auto check = [&](Index i, Index k, double jv) {
    const double hv = h.coeff(i, k);
    worst = std::max(worst, std::abs(r(i) * jv * r(k) - hv) / (1.0 + std::abs(hv)));
  };
  if (!j.is_sparse()) {
    for (Index k = 0; k < j.size(); ++k) {
      for (Index i = k; i < j.size(); ++i) check(i, k, j.dense()(i, k));
    }
  } else {
    for (Index k = 0; k < j.size(); ++k) {
      for (SparseMatrix::InnerIterator it(j.lower(), k); it; ++it) check(it.row(), k, it.value());
    }
  }
  return worst;
}

bool complementarity_holds(const Vec& s, const Vec& lam, const IpOptions& o) {
  const double thresh = o.active_rel * (1.0 + inf_norm(s));
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) < thresh && !(lam(i) > o.lambda_active_min)) return false;
  }
  return true;
}

struct StepResult {
  Vec dz;
  LdltFactors factors;
};

StepResult step_direction(const KktSystem& k, const Modification& m, InertiaOracle& oracle) {
  const Vec e = modification_diagonal(k.dims, m);
  LdltFactors f = oracle.factor_full(k.jzz, e);
  const Vec rhs = -(k.g.array() / k.s.array()).matrix();
  Vec dz = solve_inplace(f, rhs);
  const Vec r = rhs - k.jzz.plus_diagonal(e).multiply(dz);
  dz += solve_inplace(f, r);
  return StepResult{std::move(dz), std::move(f)};
}

}  // namespace

void IpOptions::validate() const {
  newton.validate();
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0,1)");
  if (!(tau_ftb > 0.0 && tau_ftb < 1.0)) throw std::invalid_argument("tau_ftb must lie in (0,1)");
  if (!(b_min >= 0.0 && b0 > b_min)) throw std::invalid_argument("need b0 > b_min >= 0");
}

double fraction_to_boundary(const PrimalDualPoint& z, const PrimalDualPoint& dz, double tau) {
  double amax = std::numeric_limits<double>::infinity();
  ratio_limit(z.sx, dz.sx, amax);
  ratio_limit(z.sy, dz.sy, amax);
  ratio_limit(z.lambda_y, dz.lambda_y, amax);
  ratio_limit(z.lambda_x, dz.lambda_x, amax);
  return std::min(1.0, tau * amax);
}

PrimalDualPoint initial_point(const MinmaxProblem& p, const Vec& x0, const Vec& y0) {
  const Dims& d = p.dims;
  if (x0.size() != d.nx || y0.size() != d.ny) {
    throw std::invalid_argument("initial_point: wrong dimension");
  }
  PrimalDualPoint z = PrimalDualPoint::zeros(d);
  z.x = x0;
  z.y = y0;
  if (d.mx > 0) z.sx = (-p.ineq_x(x0).value).cwiseMax(1.0);
  if (d.my > 0) z.sy = (-p.ineq_y(x0, y0).value).cwiseMax(1.0);
  z.lambda_x.setOnes();
  z.lambda_y.setOnes();
  return z;
}

PrimalDualPoint ip_step(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                        const Modification& m, double tau) {
  const KktSystem k = assemble_scaled_kkt(p, z, b, m);
  InertiaOracle oracle(p.dims);
  oracle.set_scale(k.hess_scale);
  const StepResult st = step_direction(k, m, oracle);
  const PrimalDualPoint dz = PrimalDualPoint::from_vector(p.dims, st.dz);
  const double alpha = fraction_to_boundary(z, dz, tau);
  if (alpha < 1e-12) throw StalledStep("ip_step: step length collapsed");
  PrimalDualPoint next = PrimalDualPoint::from_vector(p.dims, z.to_vector() + alpha * st.dz);
  next.require_interior();
  return next;
}

IpReport ip_solve(const MinmaxProblem& p, const PrimalDualPoint& z0, const IpOptions& opts) {
  p.validate();
  opts.validate();
  const Dims& d = p.dims;
  const NewtonOptions& no = opts.newton;
  IpReport rep;
  rep.z = z0;
  rep.b = opts.b0;

  const BlockLayout at(d);
  if (z0.x.size() != d.nx || z0.sx.size() != d.mx || z0.y.size() != d.ny ||
      z0.sy.size() != d.my || z0.nu_y.size() != d.ly || z0.lambda_y.size() != d.my ||
      z0.nu_x.size() != d.lx || z0.lambda_x.size() != d.mx) {
    rep.status = SolveStatus::InfeasibleStart;
    rep.note = "initial iterate does not match the problem dimensions";
    return rep;
  }
  if (!z0.interior()) {
    rep.status = SolveStatus::InfeasibleStart;
    rep.note = "initial slacks and inequality multipliers must be positive";
    return rep;
  }

  PrimalDualPoint z = z0;
  double b = opts.b0;
  InertiaOracle oracle(d);
  Modification mod;
  bool have_mod = false;
  int short_steps = 0;

  for (int k = 0;; ++k) {
    rep.z = z;
    rep.b = b;
    rep.iters = k;
    KktSystem sys;
    try {
      sys = assemble_scaled_kkt(p, z, b, Modification{});
    } catch (const CallbackFailure& e) {
      rep.status = k == 0 ? SolveStatus::InfeasibleStart : SolveStatus::Diverged;
      rep.note = e.what();
      return rep;
    }
    rep.g_inf = inf_norm(sys.g);
    oracle.set_scale(sys.hess_scale);

    if (rep.g_inf <= no.delta_s && b <= opts.b_min) {
      const InertiaVerdict v = inertia_verdict(sys.jzz, oracle);
      rep.final_inertia = v.full;
      rep.singular_hessian = v.near_singular;
      rep.complementarity_ok = complementarity_holds(z.sx, z.lambda_x, opts) &&
                               complementarity_holds(z.sy, z.lambda_y, opts);
      rep.status = (v.targets_hold && rep.complementarity_ok) ? SolveStatus::LocalMinmax
                                                               : SolveStatus::EquilibriumNotMinmax;
      rep.factorizations = oracle.factorizations();
      return rep;
    }
    if (std::max(inf_norm(z.x), inf_norm(z.y)) > no.divergence_threshold) {
      rep.status = SolveStatus::Diverged;
      rep.factorizations = oracle.factorizations();
      return rep;
    }
    if (k >= no.max_iters) {
      rep.status = SolveStatus::MaxIters;
      rep.factorizations = oracle.factorizations();
      return rep;
    }

    if (opts.verify_scaling_every > 0 && k % opts.verify_scaling_every == 0) {
      rep.max_scaling_error = std::max(
          rep.max_scaling_error, scaling_error(sys.jzz, assemble_unscaled_kkt(p, z), sys.s));
    }

    double alpha = 0.0;
    try {
      auto reselect = [&] {
        const EpsilonSelection sel = select_epsilons(sys.jzz, no.eps, oracle);
        mod = sel.mod;
        ++rep.selections;
        if (sel.instability_branch) ++rep.instability_activations;
        rep.instability_unattained = rep.instability_unattained || sel.instability_unattained;
        have_mod = true;
      };
      if (rep.g_inf > no.delta_eps || !have_mod) {
        reselect();
      } else if (lqac_holds(sys.jzz, Modification{}, oracle)) {
        mod = Modification{};
      } else if (!lqac_holds(sys.jzz, mod, oracle)) {
        reselect();
      }

      const StepResult st = step_direction(sys, mod, oracle);
      rep.nnz_factor = st.factors.nnz_l();
      if (rep.nnz_factor_first == 0) rep.nnz_factor_first = rep.nnz_factor;
      const PrimalDualPoint dz = PrimalDualPoint::from_vector(d, st.dz);
      alpha = fraction_to_boundary(z, dz, opts.tau_ftb);
      z = PrimalDualPoint::from_vector(d, z.to_vector() + alpha * st.dz);
      z.require_interior();
      ++rep.positivity_checks;
      if (no.record_trace) {
        rep.trace.push_back(IpTraceRow{k, b, rep.g_inf, alpha, mod.eps_x, mod.eps_y,
                                       inertia(st.factors)});
      }
    } catch (const EpsilonCapExceeded& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      rep.factorizations = oracle.factorizations();
      return rep;
    } catch (const SingularSystem& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      rep.factorizations = oracle.factorizations();
      return rep;
    } catch (const FactorizationBreakdown& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      rep.factorizations = oracle.factorizations();
      return rep;
    }

    short_steps = alpha < opts.stall_alpha ? short_steps + 1 : 0;
    if (short_steps >= opts.stall_limit) {
      rep.z = z;
      rep.iters = k + 1;
      rep.status = SolveStatus::SingularFailure;
      rep.note = "step length stalled";
      rep.factorizations = oracle.factorizations();
      return rep;
    }
    if (!z.to_vector().allFinite()) {
      rep.iters = k + 1;
      rep.status = SolveStatus::Diverged;
      rep.note = "iterate became non-finite";
      rep.factorizations = oracle.factorizations();
      return rep;
    }
    // Barrier update on the residual at the new iterate.
    if (b > opts.b_min) {
      const Vec g_new = assemble_residual(p, z, b);
      if (inf_norm(g_new) <= b) b = std::max(opts.sigma * b, opts.b_min);
    }
  }
}

void write_ip_trace(std::ostream& os, const IpReport& r) {
  os << "iter,b,g_inf,alpha,eps_x,eps_y,pos,neg,zero\n";
  os.precision(17);
  for (const auto& row : r.trace) {
    os << row.iter << ',' << row.b << ',' << row.g_inf << ',' << row.alpha << ',' << row.eps_x
       << ',' << row.eps_y << ',' << row.inertia.pos << ',' << row.inertia.neg << ','
       << row.inertia.zero << '\n';
  }
}

}  // namespace minmax
