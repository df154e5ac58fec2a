#include <cmath>
#include <stdexcept>

#include "minmax/chauffeur.hpp"
#include "minmax/errors.hpp"

namespace minmax {

void ChauffeurParams::validate() const {
  if (!(v > 0 && u_max > 0 && d_max > 0 && gamma_u > 0 && gamma_d > 0)) {
    throw ConfigError("chauffeur: v, u_max, d_max, gamma_u and gamma_d must be positive");
  }
  if (T < 1) throw ConfigError("chauffeur: T must be >= 1");
  if (n_steps < 0) throw ConfigError("chauffeur: n_steps must be >= 0");
  if (!x_p0.allFinite() || !x_e0.allFinite()) throw ConfigError("chauffeur: non-finite state");
}

const char* to_string(Formulation f) {
  return f == Formulation::Simultaneous ? "simultaneous" : "sequential";
}

Formulation parse_formulation(const std::string& s) {
  if (s == "simultaneous") return Formulation::Simultaneous;
  if (s == "sequential") return Formulation::Sequential;
  throw ConfigError("unknown formulation '" + s + "' (expected simultaneous or sequential)");
}

Eigen::Vector3d pursuer_step(const Eigen::Vector3d& xp, double u, double v) {
  return {xp(0) + v * std::cos(xp(2)), xp(1) + v * std::sin(xp(2)), xp(2) + u};
}

Eigen::Vector2d evader_step(const Eigen::Vector2d& xe, const Eigen::Vector2d& d) { return xe + d; }

namespace {

using Tri = std::vector<Triplet>;
using V2 = Eigen::Vector2d;

ConstraintEval control_bounds_x(const Vec& u_vals, Index stride, double bound) {
  ConstraintEval c;
  const Index T = u_vals.size();
  c.value.resize(T);
  for (Index i = 0; i < T; ++i) {
    c.value(i) = u_vals(i) * u_vals(i) - bound * bound;
    c.jacobian.emplace_back(i, stride * i, 2 * u_vals(i));
  }
  return c;
}

MinmaxProblem simultaneous(const ChauffeurParams& prm, const Eigen::Vector3d& xp0,
                           const V2& xe0) {
  const int T = prm.T;
  MinmaxProblem p;
  p.name = "chauffeur_simultaneous";
  p.dims.nx = 4 * T;
  p.dims.ny = 4 * T;
  p.dims.lx = 3 * T;
  p.dims.mx = T;
  p.dims.ly = 2 * T;
  p.dims.my = T;
  const Index nx = p.dims.nx;
  const double v = prm.v, gu = prm.gamma_u, gd = prm.gamma_d;
  using S = StageIndex;

  p.objective = [=](const Vec& x, const Vec& y) {
    double f = 0.0;
    for (int i = 0; i < T; ++i) {
      const double dx = x(S::pursuer(i)) - y(S::evader(i));
      const double dy = x(S::pursuer(i) + 1) - y(S::evader(i) + 1);
      f += dx * dx + dy * dy + gu * x(S::u(i)) * x(S::u(i)) -
           gd * (y(S::d(i)) * y(S::d(i)) + y(S::d(i) + 1) * y(S::d(i) + 1));
    }
    return f;
  };
  p.gradient = [=](const Vec& x, const Vec& y, Vec& gx, Vec& gy) {
    gx.setZero(nx);
    gy.setZero(y.size());
    for (int i = 0; i < T; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double r = x(S::pursuer(i) + k) - y(S::evader(i) + k);
        gx(S::pursuer(i) + k) = 2 * r;
        gy(S::evader(i) + k) = -2 * r;
        gy(S::d(i) + k) = -2 * gd * y(S::d(i) + k);
      }
      gx(S::u(i)) = 2 * gu * x(S::u(i));
    }
  };
  p.hessian = [=](const Vec&, const Vec&) {
    Tri h;
    h.reserve(static_cast<size_t>(9 * T));
    for (int i = 0; i < T; ++i) {
      h.emplace_back(S::u(i), S::u(i), 2 * gu);
      for (int k = 0; k < 2; ++k) {
        const Index pi = S::pursuer(i) + k, ei = nx + S::evader(i) + k, di = nx + S::d(i) + k;
        h.emplace_back(pi, pi, 2.0);
        h.emplace_back(ei, ei, 2.0);
        h.emplace_back(ei, pi, -2.0);
        h.emplace_back(di, di, -2 * gd);
      }
    }
    return h;
  };
  // Pursuer dynamics p_{i+1} - phi(p_i, u_i) = 0, with p_0 fixed.
  p.eq_x = [=](const Vec& x) {
    ConstraintEval c;
    c.value.resize(3 * T);
    c.jacobian.reserve(static_cast<size_t>(10 * T));
    for (int i = 0; i < T; ++i) {
      const Index cur = S::pursuer(i);
      Eigen::Vector3d prev = xp0;
      if (i > 0) prev = x.segment<3>(S::pursuer(i - 1));
      const Eigen::Vector3d next = pursuer_step(prev, x(S::u(i)), v);
      for (int k = 0; k < 3; ++k) {
        c.value(3 * i + k) = x(cur + k) - next(k);
        c.jacobian.emplace_back(3 * i + k, cur + k, 1.0);
      }
      c.jacobian.emplace_back(3 * i + 2, S::u(i), -1.0);
      if (i > 0) {
        const Index pv = S::pursuer(i - 1);
        c.jacobian.emplace_back(3 * i, pv, -1.0);
        c.jacobian.emplace_back(3 * i, pv + 2, v * std::sin(prev(2)));
        c.jacobian.emplace_back(3 * i + 1, pv + 1, -1.0);
        c.jacobian.emplace_back(3 * i + 1, pv + 2, -v * std::cos(prev(2)));
        c.jacobian.emplace_back(3 * i + 2, pv + 2, -1.0);
      }
    }
    return c;
  };
  p.ineq_x = [=](const Vec& x) {
    Vec u(T);
    for (int i = 0; i < T; ++i) u(i) = x(S::u(i));
    return control_bounds_x(u, 4, prm.u_max);
  };
  // Evader dynamics e_{i+1} - e_i - d_i = 0.
  p.eq_y = [=](const Vec&, const Vec& y) {
    ConstraintEval c;
    c.value.resize(2 * T);
    c.jacobian.reserve(static_cast<size_t>(6 * T));
    for (int i = 0; i < T; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double prev = i > 0 ? y(S::evader(i - 1) + k) : xe0(k);
        const Index row = 2 * i + k;
        c.value(row) = y(S::evader(i) + k) - prev - y(S::d(i) + k);
        c.jacobian.emplace_back(row, nx + S::evader(i) + k, 1.0);
        c.jacobian.emplace_back(row, nx + S::d(i) + k, -1.0);
        if (i > 0) c.jacobian.emplace_back(row, nx + S::evader(i - 1) + k, -1.0);
      }
    }
    return c;
  };
  p.ineq_y = [=](const Vec&, const Vec& y) {
    ConstraintEval c;
    c.value.resize(T);
    for (int i = 0; i < T; ++i) {
      const double a = y(S::d(i)), b = y(S::d(i) + 1);
      c.value(i) = a * a + b * b - prm.d_max * prm.d_max;
      c.jacobian.emplace_back(i, nx + S::d(i), 2 * a);
      c.jacobian.emplace_back(i, nx + S::d(i) + 1, 2 * b);
    }
    return c;
  };
  p.constraint_curvature = [=](const Vec& x, const Vec&, const MultiplierView& m) {
    Tri h;
    h.reserve(static_cast<size_t>(4 * T));
    for (int i = 0; i < T; ++i) {
      h.emplace_back(S::u(i), S::u(i), 2 * m.lambda_x(i));
      h.emplace_back(nx + S::d(i), nx + S::d(i), -2 * m.lambda_y(i));
      h.emplace_back(nx + S::d(i) + 1, nx + S::d(i) + 1, -2 * m.lambda_y(i));
      // The heading of state i (i >= 1) enters the position update of stage i.
      if (i > 0) {
        const double th = x(S::pursuer(i - 1) + 2);
        const Index ti = S::pursuer(i - 1) + 2;
        h.emplace_back(ti, ti, v * (m.nu_x(3 * i) * std::cos(th) + m.nu_x(3 * i + 1) * std::sin(th)));
      }
    }
    return h;
  };
  return p;
}

// Rollout quantities of the sequential formulation.
struct Rollout {
  std::vector<double> th;  // heading used at step j, j = 0..T-1
  std::vector<V2> r;       // r[k] = p(k) - e(k), k = 1..T (index 0 unused)
  std::vector<V2> pa;      // prefix sums of v(-sin th, cos th): pa[m] = sum_{j<m}
  std::vector<V2> pc;      // prefix sums of v(-cos th, -sin th)

  // d p(k) / d u_i
  V2 a(int k, int i) const { return i + 1 <= k ? V2(pa[k] - pa[i + 1]) : V2::Zero(); }
  // d^2 p(k) / d u_i d u_l with m = max(i, l)
  V2 c(int k, int m) const { return m + 1 <= k ? V2(pc[k] - pc[m + 1]) : V2::Zero(); }
};

Rollout rollout(double v, const Eigen::Vector3d& xp0, const V2& xe0, const Vec& u, const Vec& d) {
  const int T = static_cast<int>(u.size());
  Rollout ro;
  ro.th.resize(T);
  ro.r.assign(T + 1, V2::Zero());
  ro.pa.assign(T + 1, V2::Zero());
  ro.pc.assign(T + 1, V2::Zero());
  double th = xp0(2);
  V2 pos = xp0.head<2>();
  V2 ev = xe0;
  for (int j = 0; j < T; ++j) {
    ro.th[j] = th;
    pos += v * V2(std::cos(th), std::sin(th));
    ev += d.segment<2>(2 * j);
    ro.r[j + 1] = pos - ev;
    ro.pa[j + 1] = ro.pa[j] + v * V2(-std::sin(th), std::cos(th));
    ro.pc[j + 1] = ro.pc[j] + v * V2(-std::cos(th), -std::sin(th));
    th += u(j);
  }
  return ro;
}

MinmaxProblem sequential(const ChauffeurParams& prm, const Eigen::Vector3d& xp0, const V2& xe0) {
  const int T = prm.T;
  MinmaxProblem p;
  p.name = "chauffeur_sequential";
  p.dims.nx = T;
  p.dims.ny = 2 * T;
  p.dims.mx = T;
  p.dims.my = T;
  const Index nx = T;
  const double v = prm.v, gu = prm.gamma_u, gd = prm.gamma_d;

  p.objective = [=](const Vec& u, const Vec& d) {
    const Rollout ro = rollout(v, xp0, xe0, u, d);
    double f = gu * u.squaredNorm() - gd * d.squaredNorm();
    for (int k = 1; k <= T; ++k) f += ro.r[k].squaredNorm();
    return f;
  };
  p.gradient = [=](const Vec& u, const Vec& d, Vec& gx, Vec& gy) {
    const Rollout ro = rollout(v, xp0, xe0, u, d);
    gx = 2 * gu * u;
    gy = -2 * gd * d;
    for (int k = 1; k <= T; ++k) {
      for (int i = 0; i + 1 < k; ++i) gx(i) += 2 * ro.r[k].dot(ro.a(k, i));
    }
    // d r_k / d d_j = -I for j < k.
    V2 tail = V2::Zero();
    for (int j = T - 1; j >= 0; --j) {
      tail += ro.r[j + 1];
      gy.segment<2>(2 * j) -= 2 * tail;
    }
  };
  p.hessian = [=](const Vec& u, const Vec& d) {
    const Rollout ro = rollout(v, xp0, xe0, u, d);
    Tri h;
    h.reserve(static_cast<size_t>(9 * T * (T + 1) / 2 + 3 * T));
    for (int i = 0; i < T; ++i) {
      for (int l = 0; l <= i; ++l) {
        double s = i == l ? 2 * gu : 0.0;
        for (int k = i + 1; k <= T; ++k) {
          s += 2 * ro.a(k, i).dot(ro.a(k, l)) + 2 * ro.r[k].dot(ro.c(k, i));
        }
        h.emplace_back(i, l, s);
      }
    }
    // Mixed block: d grad_u / d d_j = sum_{k>j} -2 a(k, i).
    for (int j = 0; j < T; ++j) {
      for (int i = 0; i < T; ++i) {
        V2 s = V2::Zero();
        for (int k = std::max(j + 1, i + 1); k <= T; ++k) s -= 2 * ro.a(k, i);
        h.emplace_back(nx + 2 * j, i, s(0));
        h.emplace_back(nx + 2 * j + 1, i, s(1));
      }
    }
    for (int j = 0; j < T; ++j) {
      for (int l = 0; l <= j; ++l) {
        const double s = 2.0 * (T - j) - (j == l ? 2 * gd : 0.0);
        h.emplace_back(nx + 2 * j, nx + 2 * l, s);
        h.emplace_back(nx + 2 * j + 1, nx + 2 * l + 1, s);
      }
    }
    return h;
  };
  p.ineq_x = [=](const Vec& u) { return control_bounds_x(u, 1, prm.u_max); };
  p.ineq_y = [=](const Vec&, const Vec& d) {
    ConstraintEval c;
    c.value.resize(T);
    for (int i = 0; i < T; ++i) {
      const double a = d(2 * i), b = d(2 * i + 1);
      c.value(i) = a * a + b * b - prm.d_max * prm.d_max;
      c.jacobian.emplace_back(i, nx + 2 * i, 2 * a);
      c.jacobian.emplace_back(i, nx + 2 * i + 1, 2 * b);
    }
    return c;
  };
  p.constraint_curvature = [=](const Vec&, const Vec&, const MultiplierView& m) {
    Tri h;
    for (int i = 0; i < T; ++i) {
      h.emplace_back(i, i, 2 * m.lambda_x(i));
      h.emplace_back(nx + 2 * i, nx + 2 * i, -2 * m.lambda_y(i));
      h.emplace_back(nx + 2 * i + 1, nx + 2 * i + 1, -2 * m.lambda_y(i));
    }
    return h;
  };
  return p;
}

}  // namespace

MinmaxProblem build_horizon_problem(const ChauffeurParams& prm, const Eigen::Vector3d& xp,
                                    const Eigen::Vector2d& xe, Formulation form) {
  prm.validate();
  return form == Formulation::Simultaneous ? simultaneous(prm, xp, xe) : sequential(prm, xp, xe);
}

std::pair<Vec, Vec> horizon_primal(const ChauffeurParams& prm, const Eigen::Vector3d& xp,
                                   const Eigen::Vector2d& xe, const Vec& u, const Vec& d,
                                   Formulation form) {
  const int T = prm.T;
  if (u.size() != T || d.size() != 2 * T) {
    throw std::invalid_argument("horizon_primal: control lengths do not match T");
  }
  if (form == Formulation::Sequential) return {u, d};
  Vec x(4 * T), y(4 * T);
  Eigen::Vector3d p = xp;
  V2 e = xe;
  for (int i = 0; i < T; ++i) {
    p = pursuer_step(p, u(i), prm.v);
    e = evader_step(e, d.segment<2>(2 * i));
    x(StageIndex::u(i)) = u(i);
    x.segment<3>(StageIndex::pursuer(i)) = p;
    y.segment<2>(StageIndex::d(i)) = d.segment<2>(2 * i);
    y.segment<2>(StageIndex::evader(i)) = e;
  }
  return {x, y};
}

}  // namespace minmax
