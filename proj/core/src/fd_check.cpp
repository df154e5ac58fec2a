#include "minmax/fd_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace minmax {

namespace {

using Mat = Eigen::MatrixXd;

Mat symmetric_from_lower(Index n, const std::vector<Triplet>& t) {
  Mat m = Mat::Zero(n, n);
  for (const auto& e : t) m(std::max(e.row(), e.col()), std::min(e.row(), e.col())) += e.value();
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose().triangularView<Eigen::StrictlyUpper>();
  return m;
}

Mat dense_jacobian(Index rows, Index cols, const std::vector<Triplet>& t) {
  Mat m = Mat::Zero(rows, cols);
  for (const auto& e : t) m(e.row(), e.col()) += e.value();
  return m;
}

class Collector {
 public:
  explicit Collector(std::size_t keep) : keep_(keep) {}

  void compare(const std::string& block, const Mat& analytic, const Mat& numeric) {
    for (Index j = 0; j < analytic.cols(); ++j) {
      for (Index i = 0; i < analytic.rows(); ++i) {
        const double a = analytic(i, j);
        const double n = numeric(i, j);
        const double rel = std::abs(a - n) / std::max(1.0, std::abs(n));
        report_.max_rel_error = std::max(report_.max_rel_error, rel);
        all_.push_back(FdMismatch{block, i, j, a, n, rel});
      }
    }
  }

  FdReport finish(double tol) {
    std::stable_sort(all_.begin(), all_.end(),
                     [](const FdMismatch& a, const FdMismatch& b) { return a.rel_error > b.rel_error; });
    if (all_.size() > keep_) all_.resize(keep_);
    report_.worst = std::move(all_);
    report_.passed = report_.max_rel_error <= tol;
    return report_;
  }

 private:
  std::size_t keep_;
  std::vector<FdMismatch> all_;
  FdReport report_;
};

// Central differences of a vector-valued map of the stacked (x, y).
Mat central_jacobian(const std::function<Vec(const Vec&)>& fn, const Vec& w, Index rows, double h) {
  Mat j(rows, w.size());
  Vec wp = w;
  for (Index k = 0; k < w.size(); ++k) {
    wp(k) = w(k) + h;
    const Vec up = fn(wp);
    wp(k) = w(k) - h;
    const Vec dn = fn(wp);
    wp(k) = w(k);
    j.col(k) = (up - dn) / (2.0 * h);
  }
  return j;
}

}  // namespace

FdReport fd_check(const MinmaxProblem& p, const PrimalDualPoint& z, const FdOptions& opts) {
  const Dims& d = p.dims;
  const Index nz = d.nx + d.ny;
  const double h = opts.step;
  Vec w(nz);
  w << z.x, z.y;
  auto split_x = [&](const Vec& v) { return Vec(v.head(d.nx)); };
  auto split_y = [&](const Vec& v) { return Vec(v.tail(d.ny)); };

  auto grad = [&](const Vec& v) {
    Vec gx = Vec::Zero(d.nx), gy = Vec::Zero(d.ny);
    p.gradient(split_x(v), split_y(v), gx, gy);
    Vec g(nz);
    g << gx, gy;
    return g;
  };
  auto value = [&](const Vec& v) {
    Vec out(1);
    out(0) = p.objective(split_x(v), split_y(v));
    return out;
  };

  Collector c(opts.keep_worst);
  c.compare("grad", grad(w).transpose(), central_jacobian(value, w, 1, h));
  c.compare("hess", symmetric_from_lower(nz, p.hessian(z.x, z.y)), central_jacobian(grad, w, nz, h));

  struct Side {
    const char* name;
    Index rows;
    std::function<ConstraintEval(const Vec&)> eval;
  };
  std::vector<Side> sides;
  if (d.lx > 0) sides.push_back({"G_x", d.lx, [&](const Vec& v) { return p.eq_x(split_x(v)); }});
  if (d.mx > 0) sides.push_back({"F_x", d.mx, [&](const Vec& v) { return p.ineq_x(split_x(v)); }});
  if (d.ly > 0) sides.push_back({"G_y", d.ly, [&](const Vec& v) { return p.eq_y(split_x(v), split_y(v)); }});
  if (d.my > 0) sides.push_back({"F_y", d.my, [&](const Vec& v) { return p.ineq_y(split_x(v), split_y(v)); }});
  for (const auto& s : sides) {
    const Mat analytic = dense_jacobian(s.rows, nz, s.eval(w).jacobian);
    const Mat numeric = central_jacobian([&](const Vec& v) { return s.eval(v).value; }, w, s.rows, h);
    c.compare(s.name, analytic, numeric);
  }

  if (!d.unconstrained() && p.constraint_curvature) {
    // Gradient over (x, y) of nu_x'G_x + lambda_x'F_x + nu_y'G_y - lambda_y'F_y.
    auto weighted = [&](const Vec& v) {
      Vec g = Vec::Zero(nz);
      auto add = [&](const ConstraintEval& ce, const Vec& mult, double sign) {
        for (const auto& t : ce.jacobian) g(t.col()) += sign * mult(t.row()) * t.value();
      };
      if (d.lx > 0) add(p.eq_x(split_x(v)), z.nu_x, 1.0);
      if (d.mx > 0) add(p.ineq_x(split_x(v)), z.lambda_x, 1.0);
      if (d.ly > 0) add(p.eq_y(split_x(v), split_y(v)), z.nu_y, 1.0);
      if (d.my > 0) add(p.ineq_y(split_x(v), split_y(v)), z.lambda_y, -1.0);
      return g;
    };
    const MultiplierView m{z.nu_y, z.lambda_y, z.nu_x, z.lambda_x};
    c.compare("curvature", symmetric_from_lower(nz, p.constraint_curvature(z.x, z.y, m)),
              central_jacobian(weighted, w, nz, h));
  }
  return c.finish(opts.tol);
}

}  // namespace minmax
