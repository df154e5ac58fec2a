#include "minmax/newton.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

Vec stacked_gradient(const MinmaxProblem& p, const Vec& x, const Vec& y) {
  Vec gx = Vec::Zero(p.dims.nx), gy = Vec::Zero(p.dims.ny);
  p.gradient(x, y, gx, gy);
  if (gx.size() != p.dims.nx || gy.size() != p.dims.ny || !gx.allFinite() || !gy.allFinite()) {
    throw CallbackFailure("gradient: wrong shape or non-finite value");
  }
  Vec g(gx.size() + gy.size());
  g << gx, gy;
  return g;
}

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Solves (H + E) d = rhs from Gamma-regularized factors, with one refinement
// step against the unregularized matrix.
Vec refined_solve(const LdltFactors& f, const SymMatrix& modified, const Vec& rhs) {
  Vec d = solve_inplace(f, rhs);
  const Vec r = rhs - modified.multiply(d);
  d += solve_inplace(f, r);
  return d;
}

void require_unconstrained(const MinmaxProblem& p) {
  if (!p.dims.unconstrained()) {
    throw std::invalid_argument("Newton solver: problem '" + p.name +
                                "' has constraints; use the interior-point solver");
  }
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::LocalMinmax: return "LocalMinmax";
    case SolveStatus::EquilibriumNotMinmax: return "EquilibriumNotMinmax";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::SingularFailure: return "SingularFailure";
    case SolveStatus::InfeasibleStart: return "InfeasibleStart";
  }
  return "?";
}

SolveStatus parse_status(const std::string& s) {
  for (auto st : {SolveStatus::LocalMinmax, SolveStatus::EquilibriumNotMinmax, SolveStatus::MaxIters,
                  SolveStatus::Diverged, SolveStatus::SingularFailure, SolveStatus::InfeasibleStart}) {
    if (s == to_string(st)) return st;
  }
  throw std::invalid_argument("unknown status '" + s + "'");
}

void NewtonOptions::validate() const {
  if (!(delta_s >= 0.0)) throw std::invalid_argument("delta_s must be >= 0");
  if (!(delta_eps > delta_s)) throw std::invalid_argument("delta_eps must exceed delta_s");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  eps.validate();
}

SymMatrix hessian_matrix(const MinmaxProblem& p, const Vec& x, const Vec& y) {
  const Index n = p.dims.nx + p.dims.ny;
  const auto t = p.hessian(x, y);
  return SymMatrix::from_triplets(
      n, t, SymMatrix::choose_storage(n, static_cast<Index>(t.size()) + n));
}

std::pair<Vec, Vec> newton_step(const MinmaxProblem& p, const Vec& x, const Vec& y,
                                const Modification& m) {
  require_unconstrained(p);
  const SymMatrix h = hessian_matrix(p, x, y);
  InertiaOracle oracle(p.dims);
  oracle.set_scale(h.norm_inf());
  const Vec e = modification_diagonal(p.dims, m);
  const LdltFactors f = oracle.factor_full(h, e);
  const Vec d = refined_solve(f, h.plus_diagonal(e), -stacked_gradient(p, x, y));
  return {x + d.head(p.dims.nx), y + d.tail(p.dims.ny)};
}

namespace detail {

NewtonReport newton_iterate(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                            const NewtonOptions& opts, bool modify) {
  p.validate();
  require_unconstrained(p);
  opts.validate();
  NewtonReport rep;
  if (x0.size() != p.dims.nx || y0.size() != p.dims.ny) {
    rep.status = SolveStatus::InfeasibleStart;
    rep.note = "initial point has the wrong dimension";
    rep.x = x0;
    rep.y = y0;
    return rep;
  }
  const Index nx = p.dims.nx;
  Vec x = x0, y = y0;
  InertiaOracle oracle(p.dims);
  Modification mod;
  bool have_mod = false;

  for (int k = 0;; ++k) {
    const Vec g = stacked_gradient(p, x, y);
    rep.grad_inf = inf_norm(g);
    rep.x = x;
    rep.y = y;
    rep.iters = k;
    if (rep.grad_inf <= opts.delta_s) {
      const SymMatrix h = hessian_matrix(p, x, y);
      oracle.set_scale(h.norm_inf());
      const InertiaVerdict v = inertia_verdict(h, oracle);
      rep.final_inertia = v.full;
      rep.singular_hessian = v.near_singular;
      rep.status = v.targets_hold ? SolveStatus::LocalMinmax : SolveStatus::EquilibriumNotMinmax;
      return rep;
    }
    if (std::max(inf_norm(x), inf_norm(y)) > opts.divergence_threshold) {
      rep.status = SolveStatus::Diverged;
      return rep;
    }
    if (k >= opts.max_iters) {
      rep.status = SolveStatus::MaxIters;
      return rep;
    }

    const SymMatrix h = hessian_matrix(p, x, y);
    oracle.set_scale(h.norm_inf());
    try {
      if (!modify) {
        mod = Modification{};
        if (oracle.full(h, Vec::Zero(h.size()), 1.0) != oracle.full(h, Vec::Zero(h.size()), -1.0)) {
          rep.status = SolveStatus::SingularFailure;
          rep.note = "Hessian is singular to working precision";
          return rep;
        }
      } else if (rep.grad_inf > opts.delta_eps || !have_mod) {
        const EpsilonSelection sel = select_epsilons(h, opts.eps, oracle);
        mod = sel.mod;
        rep.instability_unattained = rep.instability_unattained || sel.instability_unattained;
        have_mod = true;
      } else if (lqac_holds(h, Modification{}, oracle)) {
        mod = Modification{};
      } else if (!lqac_holds(h, mod, oracle)) {
        const EpsilonSelection sel = select_epsilons(h, opts.eps, oracle);
        mod = sel.mod;
        rep.instability_unattained = rep.instability_unattained || sel.instability_unattained;
      }

      const Vec e = modification_diagonal(p.dims, mod);
      const LdltFactors f = oracle.factor_full(h, e);
      const Vec d = refined_solve(f, h.plus_diagonal(e), -g);
      x += d.head(nx);
      y += d.tail(p.dims.ny);
      if (opts.record_trace) {
        rep.trace.push_back(NewtonTraceRow{k, rep.grad_inf, mod.eps_x, mod.eps_y, inf_norm(d)});
      }
    } catch (const EpsilonCapExceeded& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      return rep;
    } catch (const SingularSystem& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      return rep;
    } catch (const FactorizationBreakdown& e) {
      rep.status = SolveStatus::SingularFailure;
      rep.note = e.what();
      return rep;
    }
    if (!x.allFinite() || !y.allFinite()) {
      rep.status = SolveStatus::Diverged;
      rep.note = "iterate became non-finite";
      rep.iters = k + 1;
      return rep;
    }
  }
}

}  // namespace detail

NewtonReport newton_solve(const MinmaxProblem& p, const Vec& x0, const Vec& y0,
                          const NewtonOptions& opts) {
  return detail::newton_iterate(p, x0, y0, opts, /*modify=*/true);
}

InertiaVerdict equilibrium_verdict(const MinmaxProblem& p, const Vec& x, const Vec& y) {
  require_unconstrained(p);
  const SymMatrix h = hessian_matrix(p, x, y);
  InertiaOracle oracle(p.dims);
  oracle.set_scale(h.norm_inf());
  return inertia_verdict(h, oracle);
}

ClassifyResult classify_equilibrium(const MinmaxProblem& p, const Vec& x, const Vec& y) {
  const InertiaVerdict v = equilibrium_verdict(p, x, y);
  ClassifyResult r;
  r.singular_hessian = v.near_singular;
  r.kind = v.strict() ? Classification::LocalMinmax : Classification::Other;
  return r;
}

double stability_margin_diagnostic(const MinmaxProblem& p, const Vec& x, const Vec& y,
                                   const Modification& m) {
  require_unconstrained(p);
  const Index nx = p.dims.nx, ny = p.dims.ny;
  if (m.eps_y == 0.0 || ny == 0) return m.eps_x;
  const Eigen::MatrixXd h = hessian_matrix(p, x, y).to_dense();
  const Eigen::MatrixXd hxy = h.block(0, nx, nx, ny);
  const Eigen::MatrixXd hyy = h.block(nx, nx, ny, ny);
  Eigen::MatrixXd w(ny, nx);  // H_yy^{-1} H_yx
  try {
    const LdltFactors f = ldlt_factor(SymMatrix::from_dense(hyy), GammaPolicy::none(ny));
    for (Index j = 0; j < nx; ++j) w.col(j) = solve_inplace(f, hxy.row(j).transpose());
  } catch (const FactorizationBreakdown&) {
    throw SingularSystem("stability_margin_diagnostic: y block is singular");
  }
  const Eigen::MatrixXd mat = m.eps_y * (w.transpose() * w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  return m.eps_x - es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd iteration_jacobian(const Eigen::MatrixXd& h, const Dims& dims,
                                   const Modification& m) {
  const Eigen::MatrixXd modified = h + Eigen::MatrixXd(modification_diagonal(dims, m).asDiagonal());
  return Eigen::MatrixXd::Identity(h.rows(), h.cols()) - modified.partialPivLu().solve(h);
}

void write_newton_trace(std::ostream& os, const NewtonReport& r) {
  os << "iter,grad_inf,eps_x,eps_y,step_norm\n";
  os.precision(17);
  for (const auto& row : r.trace) {
    os << row.iter << ',' << row.grad_inf << ',' << row.eps_x << ',' << row.eps_y << ','
       << row.step_norm << '\n';
  }
}

}  // namespace minmax
