#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "minmax/chauffeur.hpp"
#include "minmax/errors.hpp"

namespace minmax {

EnforceSchedule EnforceSchedule::parse(const std::string& s) {
  EnforceSchedule e;
  if (s == "on") return e;
  if (s == "off") {
    e.mode = Mode::Off;
    return e;
  }
  if (s.rfind("after:", 0) == 0) {
    const std::string n = s.substr(6);
    try {
      size_t used = 0;
      const int v = std::stoi(n, &used);
      if (used == n.size() && v >= 0) {
        e.mode = Mode::After;
        e.after = v;
        return e;
      }
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("enforce-instability must be on, off or after:N, got '" + s + "'");
}

std::string EnforceSchedule::str() const {
  switch (mode) {
    case Mode::On: return "on";
    case Mode::Off: return "off";
    case Mode::After: return "after:" + std::to_string(after);
  }
  return "?";
}

MpcOptions default_mpc_options() {
  MpcOptions o;
  o.ip.newton.max_iters = 200;
  // Solved episodes run thousands of iterations; the scaling identity is
  // covered by the tests.
  o.ip.verify_scaling_every = 0;
  return o;
}

double EpisodeLog::mean_cost() const { return mean_cost(0, static_cast<int>(steps.size())); }

double EpisodeLog::mean_cost(int from, int to) const {
  double s = 0.0;
  int n = 0;
  for (const auto& st : steps) {
    if (st.t >= from && st.t < to) {
      s += st.cost;
      ++n;
    }
  }
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

int EpisodeLog::count(SolveStatus s) const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [s](const MpcStep& st) { return st.status == s; }));
}

int EpisodeLog::fallbacks() const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [](const MpcStep& st) { return st.fallback; }));
}

namespace {

// Control sequences held by a horizon iterate.
std::pair<Vec, Vec> controls_of(const PrimalDualPoint& z, int T, Formulation form) {
  Vec u(T), d(2 * T);
  for (int i = 0; i < T; ++i) {
    if (form == Formulation::Simultaneous) {
      u(i) = z.x(StageIndex::u(i));
      d.segment<2>(2 * i) = z.y.segment<2>(StageIndex::d(i));
    } else {
      u(i) = z.x(i);
      d.segment<2>(2 * i) = z.y.segment<2>(2 * i);
    }
  }
  return {u, d};
}

// Drops the first `block` entries, repeats or fills the last block.
Vec shift(const Vec& v, Index block, std::optional<double> fill) {
  Vec out(v.size());
  const Index n = v.size();
  if (n <= block) {
    out = fill ? Vec::Constant(n, *fill) : v;
    return out;
  }
  out.head(n - block) = v.tail(n - block);
  if (fill) {
    out.tail(block).setConstant(*fill);
  } else {
    out.tail(block) = v.tail(block);
  }
  return out;
}

// Previous solution moved one step forward: controls shifted with the last
// stage repeated, trajectories re-rolled from the new states, slacks shifted,
// multipliers of the new stage set to 1.
PrimalDualPoint shifted_start(const ChauffeurParams& prm, const PrimalDualPoint& prev,
                              const Eigen::Vector3d& xp, const Eigen::Vector2d& xe,
                              Formulation form) {
  const int T = prm.T;
  auto [u, d] = controls_of(prev, T, form);
  u = shift(u, 1, std::nullopt);
  d = shift(d, 2, std::nullopt);
  PrimalDualPoint z;
  std::tie(z.x, z.y) = horizon_primal(prm, xp, xe, u, d, form);
  z.sx = shift(prev.sx, 1, std::nullopt);
  z.sy = shift(prev.sy, 1, std::nullopt);
  z.lambda_x = shift(prev.lambda_x, 1, 1.0);
  z.lambda_y = shift(prev.lambda_y, 1, 1.0);
  z.nu_x = shift(prev.nu_x, prev.nu_x.size() / T, 1.0);
  z.nu_y = shift(prev.nu_y, prev.nu_y.size() / T, 1.0);
  return z;
}

PrimalDualPoint cold_start(const ChauffeurParams& prm, const MinmaxProblem& p,
                           const Eigen::Vector3d& xp, const Eigen::Vector2d& xe, Formulation form) {
  const auto [x, y] =
      horizon_primal(prm, xp, xe, Vec::Zero(prm.T), Vec::Zero(2 * prm.T), form);
  return initial_point(p, x, y);
}

bool converged(SolveStatus s) {
  return s == SolveStatus::LocalMinmax || s == SolveStatus::EquilibriumNotMinmax;
}

}  // namespace

EpisodeLog run_mpc_episode(const ChauffeurParams& prm, const EnforceSchedule& sched,
                           const MpcOptions& opts) {
  prm.validate();
  opts.ip.validate();
  EpisodeLog log;
  log.params = prm;
  log.schedule = sched;
  Eigen::Vector3d xp = prm.x_p0;
  Eigen::Vector2d xe = prm.x_e0;
  double u_prev = 0.0;
  Eigen::Vector2d d_prev = Eigen::Vector2d::Zero();
  std::optional<PrimalDualPoint> last;

  for (int t = 0; t < prm.n_steps; ++t) {
    MpcStep st;
    st.t = t;
    st.xp = xp;
    st.xe = xe;
    st.enforce = sched.active(t);
    const MinmaxProblem p = build_horizon_problem(prm, xp, xe, opts.form);
    const PrimalDualPoint z0 = opts.warm_start && last
                                   ? shifted_start(prm, *last, xp, xe, opts.form)
                                   : cold_start(prm, p, xp, xe, opts.form);
    IpOptions ip = opts.ip;
    ip.newton.eps.enforce_instability = st.enforce;
    try {
      const IpReport rep = ip_solve(p, z0, ip);
      st.status = rep.status;
      st.iters = rep.iters;
      st.instability_activations = rep.instability_activations;
      st.note = rep.note;
      if (converged(rep.status)) {
        const auto [u, d] = controls_of(rep.z, prm.T, opts.form);
        st.u = u(0);
        st.d = d.head<2>();
        last = rep.z;
      } else {
        st.fallback = true;
      }
    } catch (const Error& e) {
      st.status = SolveStatus::SingularFailure;
      st.note = e.what();
      st.fallback = true;
    }
    // After a failure the last plan keeps moving forward, so the next solve
    // still starts from a shifted solution rather than from scratch.
    if (st.fallback && last) last = z0;
    if (st.fallback) {
      st.u = u_prev;
      st.d = d_prev;
    }
    // Solutions sit strictly inside the bounds up to the barrier floor; the
    // clamp only matters for fallbacks and rounding.
    st.u = std::clamp(st.u, -prm.u_max, prm.u_max);
    if (st.d.norm() > prm.d_max) st.d *= prm.d_max / st.d.norm();
    xp = pursuer_step(xp, st.u, prm.v);
    xe = evader_step(xe, st.d);
    st.cost = (xp.head<2>() - xe).squaredNorm();
    u_prev = st.u;
    d_prev = st.d;
    log.steps.push_back(st);
  }
  log.final_xp = xp;
  log.final_xe = xe;
  return log;
}

std::vector<ScalingRow> scaling_study(const ChauffeurParams& prm, const std::vector<int>& T_list,
                                      const std::vector<Formulation>& forms,
                                      const MpcOptions& opts, int repeats) {
  if (!std::is_sorted(T_list.begin(), T_list.end())) {
    throw ConfigError("scaling_study: horizons must be ascending");
  }
  if (repeats < 1) throw ConfigError("scaling_study: repeats must be >= 1");
  std::vector<ScalingRow> rows;
  for (const Formulation form : forms) {
    for (const int T : T_list) {
      ChauffeurParams q = prm;
      q.T = T;
      ScalingRow row;
      row.form = form;
      row.T = T;
      try {
        const MinmaxProblem p = build_horizon_problem(q, q.x_p0, q.x_e0, form);
        const PrimalDualPoint z0 = cold_start(q, p, q.x_p0, q.x_e0, form);
        row.n = p.dims.total();
        row.nnz_hessian = assemble_scaled_kkt(p, z0, opts.ip.b0, Modification{}).jzz.nnz_lower();
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < repeats; ++r) {
          const auto t0 = std::chrono::steady_clock::now();
          const IpReport rep = ip_solve(p, z0, opts.ip);
          const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          row.status = rep.status;
          row.iters = rep.iters;
          row.nnz_factor = rep.nnz_factor_first;
          row.nnz_factor_final = rep.nnz_factor;
          row.factorizations = rep.factorizations;
          row.note = rep.note;
          best = std::min(best, sec / std::max(1, rep.iters));
        }
        row.sec_per_iter = best;
      } catch (const Error& e) {
        row.status = SolveStatus::SingularFailure;
        row.note = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_episode_csv(std::ostream& os, const EpisodeLog& log) {
  os.precision(17);
  os << "t,px,py,theta,ex,ey,u,dx,dy,cost,status,iters,enforce,fallback,instability_activations\n";
  for (const auto& s : log.steps) {
    os << s.t << ',' << s.xp(0) << ',' << s.xp(1) << ',' << s.xp(2) << ',' << s.xe(0) << ','
       << s.xe(1) << ',' << s.u << ',' << s.d(0) << ',' << s.d(1) << ',' << s.cost << ','
       << to_string(s.status) << ',' << s.iters << ',' << int(s.enforce) << ','
       << int(s.fallback) << ',' << s.instability_activations << '\n';
  }
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
  os.precision(10);
  os << "mode,T,n,status,iters,sec_per_iter,nnz_hessian,nnz_factor,nnz_factor_final,"
        "factorizations\n";
  for (const auto& r : rows) {
    os << to_string(r.form) << ',' << r.T << ',' << r.n << ',' << to_string(r.status) << ','
       << r.iters << ',' << r.sec_per_iter << ',' << r.nnz_hessian << ',' << r.nnz_factor << ','
       << r.nnz_factor_final << ',' << r.factorizations << '\n';
  }
}

void write_episode_svg(std::ostream& os, const std::vector<const EpisodeLog*>& logs) {
  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  bool first = true;
  auto grow = [&](double x, double y) {
    if (first) {
      lo_x = hi_x = x;
      lo_y = hi_y = y;
      first = false;
    }
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto* l : logs) {
    for (const auto& s : l->steps) {
      grow(s.xp(0), s.xp(1));
      grow(s.xe(0), s.xe(1));
    }
    grow(l->final_xp(0), l->final_xp(1));
    grow(l->final_xe(0), l->final_xe(1));
  }
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-9;
  lo_x -= pad;
  lo_y -= pad;
  hi_x += pad;
  hi_y += pad;
  const double w = 600, scale = w / std::max(hi_x - lo_x, hi_y - lo_y);
  const double h = (hi_y - lo_y) * scale;
  auto px = [&](double x) { return (x - lo_x) * scale; };
  auto py = [&](double y) { return h - (y - lo_y) * scale; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char* dash[] = {"", "6,3", "2,2", "8,2,2,2"};
  for (size_t k = 0; k < logs.size(); ++k) {
    const auto* l = logs[k];
    for (int who = 0; who < 2; ++who) {
      os << "<polyline fill=\"none\" stroke=\"" << (who == 0 ? "#1f5fbf" : "#c0392b")
         << "\" stroke-width=\"1.5\" stroke-dasharray=\"" << dash[k % 4] << "\" points=\"";
      for (const auto& s : l->steps) {
        const double x = who == 0 ? s.xp(0) : s.xe(0), y = who == 0 ? s.xp(1) : s.xe(1);
        os << px(x) << ',' << py(y) << ' ';
      }
      const double x = who == 0 ? l->final_xp(0) : l->final_xe(0);
      const double y = who == 0 ? l->final_xp(1) : l->final_xe(1);
      os << px(x) << ',' << py(y) << "\"/>\n";
    }
    os << "<text x=\"8\" y=\"" << 16 + 14 * k << "\" font-size=\"12\" font-family=\"monospace\">"
       << "enforce=" << l->schedule.str() << " mean cost=" << l->mean_cost() << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace minmax
