#include "minmax/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

void GdaOptions::validate() const {
  if (!(alpha_x > 0.0 && alpha_y > 0.0)) throw std::invalid_argument("GDA steps must be positive");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(delta_s >= 0.0)) throw std::invalid_argument("delta_s must be >= 0");
}

NewtonReport pure_newton_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                               const NewtonOptions& opts) {
  return detail::newton_iterate(p, x0, y0, opts, /*modify=*/false);
}

NewtonReport gda_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                       const GdaOptions& opts) {
  p.validate();
  opts.validate();
  if (!p.dims.unconstrained()) {
    throw std::invalid_argument("gda_solve: problem '" + p.name + "' has constraints");
  }
  NewtonReport rep;
  Vec x = x0, y = y0;
  Vec gx(p.dims.nx), gy(p.dims.ny);
  for (int k = 0;; ++k) {
    p.gradient(x, y, gx, gy);
    const double gi = std::max(gx.size() ? gx.cwiseAbs().maxCoeff() : 0.0,
                               gy.size() ? gy.cwiseAbs().maxCoeff() : 0.0);
    rep.x = x;
    rep.y = y;
    rep.iters = k;
    rep.grad_inf = gi;
    if (!std::isfinite(gi)) {
      rep.status = SolveStatus::Diverged;
      return rep;
    }
    if (gi <= opts.delta_s) {
      const InertiaVerdict v = equilibrium_verdict(p, x, y);
      rep.final_inertia = v.full;
      rep.singular_hessian = v.near_singular;
      rep.status = v.targets_hold ? SolveStatus::LocalMinmax : SolveStatus::EquilibriumNotMinmax;
      return rep;
    }
    const double size = std::max(x.size() ? x.cwiseAbs().maxCoeff() : 0.0,
                                 y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
    if (size > opts.divergence_threshold) {
      rep.status = SolveStatus::Diverged;
      return rep;
    }
    if (k >= opts.max_iters) {
      rep.status = SolveStatus::MaxIters;
      return rep;
    }
    x -= opts.alpha_x * gx;
    y += opts.alpha_y * gy;
    if (opts.record_trace) {
      const double step = std::max(opts.alpha_x * (gx.size() ? gx.cwiseAbs().maxCoeff() : 0.0),
                                   opts.alpha_y * (gy.size() ? gy.cwiseAbs().maxCoeff() : 0.0));
      rep.trace.push_back(NewtonTraceRow{k, gi, 0.0, 0.0, step});
    }
  }
}

}  // namespace minmax
