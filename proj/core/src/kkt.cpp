#include "minmax/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minmax/errors.hpp"

namespace minmax {

namespace {

void require_size(const Vec& v, Index n, const char* what) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << ": expected length " << n << ", got " << v.size();
    throw CallbackFailure(msg.str());
  }
  if (!v.allFinite()) throw CallbackFailure(std::string(what) + ": non-finite value");
}

void check_constraint(const ConstraintEval& c, Index rows, Index cols, const char* what) {
  require_size(c.value, rows, what);
  for (const auto& t : c.jacobian) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols ||
        !std::isfinite(t.value())) {
      throw CallbackFailure(std::string(what) + ": bad Jacobian entry");
    }
  }
}

ConstraintEval empty_constraint() { return ConstraintEval{Vec(0), {}}; }

// result += J' * w restricted to the columns in [col_lo, col_hi), written at
// result(col - col_lo).
void add_jt_times(const std::vector<Triplet>& jac, const Vec& w, double sign, Index col_lo,
                  Index col_hi, Vec& result) {
  for (const auto& t : jac) {
    if (t.col() >= col_lo && t.col() < col_hi) {
      result(t.col() - col_lo) += sign * t.value() * w(t.row());
    }
  }
}

bool is_positive(const Vec& v) { return (v.array() > 0.0).all(); }

SymMatrix build_matrix(const MinmaxProblem& p, const PrimalDualPoint& z, const PointEval& ev,
                       bool scaled) {
  const Dims& d = p.dims;
  const BlockLayout at(d);
  std::vector<Triplet> t;
  t.reserve(ev.hess.size() + ev.eq_x.jacobian.size() + ev.ineq_x.jacobian.size() +
            ev.eq_y.jacobian.size() + ev.ineq_y.jacobian.size() +
            static_cast<size_t>(3 * (d.mx + d.my)));
  auto var = [&](Index c) { return c < d.nx ? at.x + c : at.y + (c - d.nx); };

  for (const auto& h : ev.hess) t.emplace_back(var(h.row()), var(h.col()), h.value());
  for (Index i = 0; i < d.mx; ++i) {
    const double lam = z.lambda_x(i);
    const double s = z.sx(i);
    t.emplace_back(at.sx + i, at.sx + i, scaled ? lam / s : lam);
    t.emplace_back(at.lam_x + i, at.sx + i, scaled ? 1.0 : std::sqrt(s));
  }
  for (Index i = 0; i < d.my; ++i) {
    const double lam = z.lambda_y(i);
    const double s = z.sy(i);
    t.emplace_back(at.sy + i, at.sy + i, scaled ? -lam / s : -lam);
    t.emplace_back(at.lam_y + i, at.sy + i, scaled ? -1.0 : -std::sqrt(s));
  }
  for (const auto& j : ev.eq_x.jacobian) t.emplace_back(at.nu_x + j.row(), var(j.col()), j.value());
  for (const auto& j : ev.ineq_x.jacobian) t.emplace_back(at.lam_x + j.row(), var(j.col()), j.value());
  for (const auto& j : ev.eq_y.jacobian) t.emplace_back(at.nu_y + j.row(), var(j.col()), j.value());
  for (const auto& j : ev.ineq_y.jacobian) t.emplace_back(at.lam_y + j.row(), var(j.col()), -j.value());

  // Duplicates are summed, so count the distinct lower positions for the
  // storage decision.
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(t.size());
  for (const auto& e : t) pos.emplace_back(std::max(e.row(), e.col()), std::min(e.row(), e.col()));
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  Index nnz = static_cast<Index>(pos.size());
  for (Index k = 0; k < at.n; ++k) {
    if (!std::binary_search(pos.begin(), pos.end(), std::make_pair(k, k))) ++nnz;
  }
  return SymMatrix::from_triplets(at.n, t, SymMatrix::choose_storage(at.n, nnz));
}

}  // namespace

void Dims::validate() const {
  if (nx < 0 || ny < 0 || lx < 0 || ly < 0 || mx < 0 || my < 0) {
    throw CallbackFailure("Dims: negative count");
  }
}

BlockLayout::BlockLayout(const Dims& d) {
  x = 0;
  sx = x + d.nx;
  y = sx + d.mx;
  sy = y + d.ny;
  nu_y = sy + d.my;
  lam_y = nu_y + d.ly;
  nu_x = lam_y + d.my;
  lam_x = nu_x + d.lx;
  n = lam_x + d.mx;
}

void MinmaxProblem::validate() const {
  dims.validate();
  if (!objective || !gradient || !hessian) {
    throw CallbackFailure("MinmaxProblem '" + name + "': objective callbacks missing");
  }
  if ((dims.lx > 0 && !eq_x) || (dims.mx > 0 && !ineq_x) || (dims.ly > 0 && !eq_y) ||
      (dims.my > 0 && !ineq_y)) {
    throw CallbackFailure("MinmaxProblem '" + name + "': constraint callbacks missing");
  }
}

PrimalDualPoint PrimalDualPoint::zeros(const Dims& d) {
  PrimalDualPoint z;
  z.x = Vec::Zero(d.nx);
  z.sx = Vec::Zero(d.mx);
  z.y = Vec::Zero(d.ny);
  z.sy = Vec::Zero(d.my);
  z.nu_y = Vec::Zero(d.ly);
  z.lambda_y = Vec::Zero(d.my);
  z.nu_x = Vec::Zero(d.lx);
  z.lambda_x = Vec::Zero(d.mx);
  return z;
}

Vec PrimalDualPoint::to_vector() const {
  Vec v(x.size() + sx.size() + y.size() + sy.size() + nu_y.size() + lambda_y.size() +
        nu_x.size() + lambda_x.size());
  v << x, sx, y, sy, nu_y, lambda_y, nu_x, lambda_x;
  return v;
}

PrimalDualPoint PrimalDualPoint::from_vector(const Dims& d, const Vec& v) {
  const BlockLayout at(d);
  if (v.size() != at.n) throw std::invalid_argument("PrimalDualPoint: length mismatch");
  PrimalDualPoint z;
  z.x = v.segment(at.x, d.nx);
  z.sx = v.segment(at.sx, d.mx);
  z.y = v.segment(at.y, d.ny);
  z.sy = v.segment(at.sy, d.my);
  z.nu_y = v.segment(at.nu_y, d.ly);
  z.lambda_y = v.segment(at.lam_y, d.my);
  z.nu_x = v.segment(at.nu_x, d.lx);
  z.lambda_x = v.segment(at.lam_x, d.mx);
  return z;
}

bool PrimalDualPoint::interior() const {
  return is_positive(sx) && is_positive(sy) && is_positive(lambda_x) && is_positive(lambda_y);
}

void PrimalDualPoint::require_interior() const {
  if (!interior()) {
    throw DomainViolation("slack or inequality multiplier is not strictly positive");
  }
}

PointEval evaluate_point(const MinmaxProblem& p, const PrimalDualPoint& z) {
  const Dims& d = p.dims;
  require_size(z.x, d.nx, "x");
  require_size(z.y, d.ny, "y");
  PointEval ev;
  ev.gx = Vec::Zero(d.nx);
  ev.gy = Vec::Zero(d.ny);
  p.gradient(z.x, z.y, ev.gx, ev.gy);
  require_size(ev.gx, d.nx, "gradient x");
  require_size(ev.gy, d.ny, "gradient y");

  const Index nz = d.nx + d.ny;
  ev.hess = p.hessian(z.x, z.y);
  ev.eq_x = d.lx > 0 ? p.eq_x(z.x) : empty_constraint();
  ev.ineq_x = d.mx > 0 ? p.ineq_x(z.x) : empty_constraint();
  ev.eq_y = d.ly > 0 ? p.eq_y(z.x, z.y) : empty_constraint();
  ev.ineq_y = d.my > 0 ? p.ineq_y(z.x, z.y) : empty_constraint();
  check_constraint(ev.eq_x, d.lx, d.nx, "G_x");
  check_constraint(ev.ineq_x, d.mx, d.nx, "F_x");
  check_constraint(ev.eq_y, d.ly, nz, "G_y");
  check_constraint(ev.ineq_y, d.my, nz, "F_y");

  if (p.constraint_curvature && !d.unconstrained()) {
    const MultiplierView m{z.nu_y, z.lambda_y, z.nu_x, z.lambda_x};
    auto extra = p.constraint_curvature(z.x, z.y, m);
    ev.hess.insert(ev.hess.end(), extra.begin(), extra.end());
  }
  // Absolute row sums; duplicates are not merged, which only overestimates.
  Vec rows = Vec::Zero(nz);
  for (const auto& h : ev.hess) {
    if (h.row() < 0 || h.row() >= nz || h.col() < 0 || h.col() >= nz ||
        !std::isfinite(h.value())) {
      throw CallbackFailure("hessian: bad entry");
    }
    rows(h.row()) += std::abs(h.value());
    if (h.row() != h.col()) rows(h.col()) += std::abs(h.value());
  }
  ev.hess_scale = nz > 0 ? rows.maxCoeff() : 0.0;
  return ev;
}

Vec assemble_residual(const MinmaxProblem& p, const PrimalDualPoint& z, double b) {
  return assemble_residual(p, z, b, evaluate_point(p, z));
}

Vec assemble_residual(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                      const PointEval& ev) {
  const Dims& d = p.dims;
  const BlockLayout at(d);
  const Index nz = d.nx + d.ny;
  Vec g(at.n);

  Vec lx = ev.gx;
  add_jt_times(ev.eq_x.jacobian, z.nu_x, 1.0, 0, d.nx, lx);
  add_jt_times(ev.ineq_x.jacobian, z.lambda_x, 1.0, 0, d.nx, lx);
  add_jt_times(ev.eq_y.jacobian, z.nu_y, 1.0, 0, d.nx, lx);
  add_jt_times(ev.ineq_y.jacobian, z.lambda_y, -1.0, 0, d.nx, lx);
  Vec ly = ev.gy;
  add_jt_times(ev.eq_y.jacobian, z.nu_y, 1.0, d.nx, nz, ly);
  add_jt_times(ev.ineq_y.jacobian, z.lambda_y, -1.0, d.nx, nz, ly);

  g.segment(at.x, d.nx) = lx;
  g.segment(at.sx, d.mx) = z.lambda_x.cwiseProduct(z.sx).array() - b;
  g.segment(at.y, d.ny) = ly;
  g.segment(at.sy, d.my) = (-z.lambda_y.cwiseProduct(z.sy)).array() + b;
  g.segment(at.nu_y, d.ly) = ev.eq_y.value;
  g.segment(at.lam_y, d.my) = -ev.ineq_y.value - z.sy;
  g.segment(at.nu_x, d.lx) = ev.eq_x.value;
  g.segment(at.lam_x, d.mx) = ev.ineq_x.value + z.sx;
  return g;
}

SymMatrix KktSystem::modified() const { return modified(mod); }

SymMatrix KktSystem::modified(const Modification& m) const {
  return jzz.plus_diagonal(modification_diagonal(dims, m));
}

SymMatrix KktSystem::jyy() const {
  const BlockLayout at(dims);
  return jzz.principal_block(at.yy_offset(), at.yy_size());
}

KktSystem assemble_scaled_kkt(const MinmaxProblem& p, const PrimalDualPoint& z, double b,
                              const Modification& m) {
  z.require_interior();
  const PointEval ev = evaluate_point(p, z);
  KktSystem k;
  k.dims = p.dims;
  k.g = assemble_residual(p, z, b, ev);
  k.jzz = build_matrix(p, z, ev, /*scaled=*/true);
  const BlockLayout at(p.dims);
  k.s = Vec::Ones(at.n);
  k.s.segment(at.sx, p.dims.mx) = z.sx;
  k.s.segment(at.sy, p.dims.my) = z.sy;
  k.b = b;
  k.mod = m;
  k.hess_scale = ev.hess_scale;
  return k;
}

SymMatrix assemble_unscaled_kkt(const MinmaxProblem& p, const PrimalDualPoint& z) {
  z.require_interior();
  return build_matrix(p, z, evaluate_point(p, z), /*scaled=*/false);
}

Vec modification_diagonal(const Dims& d, const Modification& m) {
  const BlockLayout at(d);
  Vec e = Vec::Zero(at.n);
  e.segment(at.x, d.nx).setConstant(m.eps_x);
  e.segment(at.y, d.ny).setConstant(-m.eps_y);
  return e;
}

Vec modification_diagonal_yy(const Dims& d, double eps_y) {
  const BlockLayout at(d);
  Vec e = Vec::Zero(at.yy_size());
  e.head(d.ny).setConstant(eps_y);
  return e;
}

std::vector<std::int8_t> gamma_signs(const Dims& d) {
  const BlockLayout at(d);
  std::vector<std::int8_t> s(static_cast<size_t>(at.n), 1);
  for (Index i = at.y; i < at.nu_y; ++i) s[static_cast<size_t>(i)] = -1;
  for (Index i = at.nu_x; i < at.n; ++i) s[static_cast<size_t>(i)] = -1;
  return s;
}

std::vector<std::int8_t> gamma_signs_yy(const Dims& d) {
  const BlockLayout at(d);
  std::vector<std::int8_t> s(static_cast<size_t>(at.yy_size()), 1);
  for (Index i = 0; i < d.ny + d.my; ++i) s[static_cast<size_t>(i)] = -1;
  return s;
}

Inertia target_inertia(const Dims& d) {
  return Inertia{d.nx + d.mx + d.ly + d.my, d.lx + d.mx + d.ny + d.my, 0};
}

Inertia target_inertia_yy(const Dims& d) { return Inertia{d.ly + d.my, d.ny + d.my, 0}; }

}  // namespace minmax
