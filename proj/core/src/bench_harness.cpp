#include "minmax/bench_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <random>
#include <thread>

#include "minmax/errors.hpp"
#include "minmax/test_functions.hpp"

namespace minmax {

const char* to_string(SolverId s) {
  switch (s) {
    case SolverId::Alg1: return "alg1";
    case SolverId::PureNewton: return "pure_newton";
    case SolverId::Gda: return "gda";
  }
  return "?";
}

SolverId parse_solver(const std::string& s) {
  for (auto id : {SolverId::Alg1, SolverId::PureNewton, SolverId::Gda}) {
    if (s == to_string(id)) return id;
  }
  throw ConfigError("unknown solver '" + s + "' (expected alg1, pure_newton or gda)");
}

const SummaryRow& BenchSummary::row(const std::string& function, SolverId solver) const {
  for (const auto& r : rows) {
    if (r.function == function && r.solver == solver) return r;
  }
  throw std::out_of_range("no summary row for " + function + "/" + to_string(solver));
}

std::vector<std::pair<double, double>> init_points(int n, unsigned long long seed, double lo,
                                                   double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const double a = dist(rng);
    const double b = dist(rng);
    pts.emplace_back(a, b);
  }
  return pts;
}

TrialResult run_trial(const MinmaxProblem& p, SolverId solver, double x0, double y0,
                      const NewtonOptions& newton, const GdaOptions& gda) {
  const Vec vx = Vec::Constant(1, x0);
  const Vec vy = Vec::Constant(p.dims.ny, y0);
  NewtonReport rep;
  switch (solver) {
    case SolverId::Alg1: rep = newton_solve(p, vx, vy, newton); break;
    case SolverId::PureNewton: rep = pure_newton_solve(p, vx, vy, newton); break;
    case SolverId::Gda: rep = gda_solve(p, vx, vy, gda); break;
  }
  TrialResult t;
  t.function = p.name;
  t.solver = solver;
  t.x0 = x0;
  t.y0 = y0;
  t.status = rep.status;
  t.iters = rep.iters;
  t.x = rep.x.size() ? rep.x(0) : 0.0;
  t.y = rep.y.size() ? rep.y(0) : 0.0;
  t.singular_hessian = rep.singular_hessian;
  return t;
}

BenchSummary run_benchmark(const BenchConfig& cfg) {
  if (cfg.n_trials < 1) throw ConfigError("n_trials must be >= 1");
  const auto pts = init_points(cfg.n_trials, cfg.seed, cfg.box_lo, cfg.box_hi);

  struct Job {
    size_t problem;
    SolverId solver;
    int trial;
  };
  std::vector<MinmaxProblem> problems;
  for (const auto& f : cfg.functions) problems.push_back(builtin_problem(f));
  std::vector<Job> jobs;
  for (size_t fi = 0; fi < problems.size(); ++fi) {
    for (const SolverId s : cfg.solvers) {
      for (int k = 0; k < cfg.n_trials; ++k) jobs.push_back(Job{fi, s, k});
    }
  }

  auto gda_for = [&](const std::string& fn) {
    GdaOptions g = cfg.gda;
    const auto it = cfg.gda_steps.find(fn);
    if (it != cfg.gda_steps.end()) {
      g.alpha_x = it->second.first;
      g.alpha_y = it->second.second;
    }
    return g;
  };

  std::vector<TrialResult> results(jobs.size());
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  auto run_range = [&](size_t begin, size_t step) {
    for (size_t j = begin; j < jobs.size(); j += step) {
      const Job& job = jobs[j];
      const auto& [x0, y0] = pts[static_cast<size_t>(job.trial)];
      const MinmaxProblem& p = problems[job.problem];
      results[j] = run_trial(p, job.solver, x0, y0, cfg.newton, gda_for(p.name));
      results[j].trial = job.trial;
    }
  };
  if (workers <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& t : pool) t.join();
  }

  BenchSummary out;
  out.trials = std::move(results);
  for (size_t fi = 0; fi < problems.size(); ++fi) {
    for (const SolverId s : cfg.solvers) {
      SummaryRow r;
      r.function = problems[fi].name;
      r.solver = s;
      double iter_sum = 0.0;
      for (const auto& t : out.trials) {
        if (t.function != r.function || t.solver != s) continue;
        ++r.trials;
        if (t.equilibrium()) ++r.eq;
        if (t.minmax()) {
          ++r.minmax;
          iter_sum += t.iters;
        }
      }
      r.mean_iters = r.minmax > 0 ? iter_sum / r.minmax : std::numeric_limits<double>::quiet_NaN();
      out.rows.push_back(r);
    }
  }
  return out;
}

void write_trials_csv(std::ostream& os, const BenchSummary& s) {
  os.precision(17);
  os << "function,solver,trial,x0,y0,status,iters,x,y,equilibrium,minmax,singular_hessian\n";
  for (const auto& t : s.trials) {
    os << t.function << ',' << to_string(t.solver) << ',' << t.trial << ',' << t.x0 << ','
       << t.y0 << ',' << to_string(t.status) << ',' << t.iters << ',' << t.x << ',' << t.y << ','
       << int(t.equilibrium()) << ',' << int(t.minmax()) << ',' << int(t.singular_hessian) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const BenchSummary& s) {
  os << "function,solver,trials,eq,minmax,mean_iters\n";
  for (const auto& r : s.rows) {
    os << r.function << ',' << to_string(r.solver) << ',' << r.trials << ',' << r.eq << ','
       << r.minmax << ',';
    if (std::isnan(r.mean_iters)) {
      os << "";
    } else {
      os << std::fixed;
      os.precision(2);
      os << r.mean_iters;
      os.unsetf(std::ios::floatfield);
    }
    os << '\n';
  }
}

void write_manifest(std::ostream& os, const BenchConfig& cfg, const BenchSummary& s) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.n_trials;
  j["init_box"] = {cfg.box_lo, cfg.box_hi};
  j["functions"] = cfg.functions;
  std::vector<std::string> solvers;
  for (auto sid : cfg.solvers) solvers.emplace_back(to_string(sid));
  j["solvers"] = solvers;
  j["newton"] = {{"delta_s", cfg.newton.delta_s},
                 {"delta_eps", cfg.newton.delta_eps},
                 {"max_iters", cfg.newton.max_iters},
                 {"eps_growth", cfg.newton.eps.eps_growth},
                 {"eps_cap_steps", cfg.newton.eps.eps_cap_steps},
                 {"mu_grid", cfg.newton.eps.mu_grid}};
  nlohmann::json gda = {{"alpha_x", cfg.gda.alpha_x},
                        {"alpha_y", cfg.gda.alpha_y},
                        {"max_iters", cfg.gda.max_iters}};
  for (const auto& [fn, steps] : cfg.gda_steps) {
    gda["per_function"][fn] = {steps.first, steps.second};
  }
  j["gda"] = gda;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"function", r.function},
                    {"solver", to_string(r.solver)},
                    {"eq", r.eq},
                    {"minmax", r.minmax},
                    {"trials", r.trials}});
  }
  j["summary"] = rows;
  os << j.dump(2) << '\n';
}

}  // namespace minmax
