#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "minmax/baselines.hpp"
#include "minmax/bench_harness.hpp"
#include "minmax/chauffeur.hpp"
#include "minmax/errors.hpp"
#include "minmax/interior_point.hpp"
#include "minmax/newton.hpp"
#include "minmax/test_functions.hpp"

namespace minmax::cli {

namespace fs = std::filesystem;

namespace {

// Everything a run can be configured with. Flags override the config file,
// which overrides these defaults.
struct RunConfig {
  std::string out_dir = ".";
  bool trace = false;
  unsigned long long seed = 1;

  // solve
  std::string problem;
  std::string fixture_path;
  std::string solver = "alg1";
  std::vector<double> x0 = {0.0};
  std::vector<double> y0 = {0.0};

  IpOptions ip;  // ip.newton holds the Newton settings shared by every command
  GdaOptions gda;

  // bench
  std::vector<std::string> functions = {"f1", "f2", "f3", "f4"};
  std::vector<std::string> solvers = {"pure_newton", "gda", "alg1"};
  int trials = 1000;
  double box_lo = -3.0, box_hi = 3.0;
  int threads = 0;
  std::vector<std::string> gda_steps;  // "f:ax,ay"

  // mpc
  ChauffeurParams chauffeur;
  std::vector<double> xp0 = {0.0, 0.0, 0.0};
  std::vector<double> xe0 = {1.0, 0.5};
  std::vector<std::string> enforce = {"on"};
  std::vector<int> scaling;
  std::string mode = "simultaneous";
  int repeats = 3;
  bool svg = false;
  bool cold = false;
  int mpc_max_iters = default_mpc_options().ip.newton.max_iters;
};

void add_newton_flags(CLI::App* app, RunConfig& c, int* max_iters = nullptr) {
  auto& n = c.ip.newton;
  app->add_option("--delta-s", n.delta_s, "Stationarity tolerance on ||g||_inf")->capture_default_str();
  app->add_option("--delta-eps", n.delta_eps, "Residual below which the modification is frozen")
      ->capture_default_str();
  app->add_option("--max-iters", max_iters ? *max_iters : n.max_iters, "Iteration cap")
      ->capture_default_str();
  app->add_option("--divergence", n.divergence_threshold, "Iterates beyond this are Diverged")
      ->capture_default_str();
  app->add_option("--eps-growth", n.eps.eps_growth, "Growth factor of the modification search")
      ->capture_default_str();
  app->add_option("--eps-start", n.eps.start_factor, "Relative starting modification")
      ->capture_default_str();
  app->add_option("--eps-cap-steps", n.eps.eps_cap_steps, "Growth steps before giving up")
      ->capture_default_str();
  app->add_option("--mu-grid", n.eps.mu_grid, "Scalings probed by the instability test")
      ->delimiter(',')
      ->capture_default_str();
}

void add_ip_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--b0", c.ip.b0, "Initial barrier parameter")->capture_default_str();
  app->add_option("--sigma", c.ip.sigma, "Barrier reduction factor")->capture_default_str();
  app->add_option("--b-min", c.ip.b_min, "Final barrier parameter")->capture_default_str();
  app->add_option("--tau", c.ip.tau_ftb, "Fraction-to-boundary factor")->capture_default_str();
}

Vec broadcast(const std::vector<double>& v, Index n, const char* what) {
  if (static_cast<Index>(v.size()) == n) return Eigen::Map<const Vec>(v.data(), n);
  if (v.size() == 1) return Vec::Constant(n, v[0]);
  throw ConfigError(std::string(what) + " needs 1 or " + std::to_string(n) + " values");
}

fs::path prepare_out_dir(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

void print_vec(std::ostream& out, const char* label, const Vec& v) {
  out << label << ":";
  for (Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
  out << '\n';
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  std::string spec = c.problem;
  if (!c.fixture_path.empty()) {
    std::ifstream f(c.fixture_path);
    if (!f) throw ConfigError("cannot read fixture " + c.fixture_path);
    std::getline(f, spec);
  }
  if (spec.empty()) throw ConfigError("solve needs --problem or --fixture");
  const MinmaxProblem p = problem_from_fixture(spec);
  const Vec x0 = broadcast(c.x0, p.dims.nx, "--x0");
  const Vec y0 = broadcast(c.y0, p.dims.ny, "--y0");
  out.precision(12);
  out << "problem: " << p.name << "\nsolver: " << c.solver << '\n';

  SolveStatus status;
  if (!p.dims.unconstrained()) {
    if (c.solver != "alg1") {
      throw ConfigError("constrained problems are solved only by alg1 (interior point)");
    }
    IpOptions ip = c.ip;
    ip.newton.record_trace = c.trace;
    const IpReport r = ip_solve(p, initial_point(p, x0, y0), ip);
    status = r.status;
    out << "status: " << to_string(r.status) << '\n';
    print_vec(out, "x", r.z.x);
    print_vec(out, "y", r.z.y);
    out << "iters: " << r.iters << "\ng_inf: " << r.g_inf << "\nb: " << r.b
        << "\ncomplementarity_ok: " << r.complementarity_ok
        << "\nsingular_hessian: " << r.singular_hessian << '\n';
    if (!r.note.empty()) out << "note: " << r.note << '\n';
    if (c.trace) {
      auto f = open_out(prepare_out_dir(c) / "trace.csv");
      write_ip_trace(f, r);
    }
  } else {
    NewtonOptions n = c.ip.newton;
    n.record_trace = c.trace;
    GdaOptions g = c.gda;
    g.record_trace = c.trace;
    NewtonReport r;
    switch (parse_solver(c.solver)) {
      case SolverId::Alg1: r = newton_solve(p, x0, y0, n); break;
      case SolverId::PureNewton: r = pure_newton_solve(p, x0, y0, n); break;
      case SolverId::Gda: r = gda_solve(p, x0, y0, g); break;
    }
    status = r.status;
    out << "status: " << to_string(r.status) << '\n';
    print_vec(out, "x", r.x);
    print_vec(out, "y", r.y);
    out << "iters: " << r.iters << "\ngrad_inf: " << r.grad_inf
        << "\nsingular_hessian: " << r.singular_hessian << '\n';
    if (!r.note.empty()) out << "note: " << r.note << '\n';
    if (c.trace) {
      auto f = open_out(prepare_out_dir(c) / "trace.csv");
      write_newton_trace(f, r);
    }
  }
  return status == SolveStatus::LocalMinmax ? kOk : kOther;
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
  BenchConfig b;
  b.functions = c.functions;
  b.solvers.clear();
  for (const auto& s : c.solvers) b.solvers.push_back(parse_solver(s));
  b.n_trials = c.trials;
  b.seed = c.seed;
  b.box_lo = c.box_lo;
  b.box_hi = c.box_hi;
  b.newton = c.ip.newton;
  b.gda = c.gda;
  b.threads = c.threads;
  for (const auto& item : c.gda_steps) {
    const auto colon = item.find(':');
    const auto comma = item.find(',', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || comma == std::string::npos) {
      throw ConfigError("--gda-step expects name:alpha_x,alpha_y, got '" + item + "'");
    }
    try {
      b.gda_steps[item.substr(0, colon)] = {std::stod(item.substr(colon + 1, comma - colon - 1)),
                                            std::stod(item.substr(comma + 1))};
    } catch (const std::exception&) {
      throw ConfigError("--gda-step has a non-numeric step in '" + item + "'");
    }
  }
  for (const auto& f : b.functions) (void)builtin_problem(f);  // unknown names are usage errors
  b.newton.validate();
  b.gda.validate();

  const BenchSummary s = run_benchmark(b);
  const fs::path dir = prepare_out_dir(c);
  {
    auto f = open_out(dir / "trials.csv");
    write_trials_csv(f, s);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, s);
  }
  {
    auto f = open_out(dir / "manifest.json");
    write_manifest(f, b, s);
  }
  write_summary_csv(out, s);
  bool sound = true;
  for (const auto& r : s.rows) {
    if (r.solver == SolverId::Alg1 && r.eq != r.minmax) sound = false;
  }
  out << "alg1 soundness (eq == minmax): " << (sound ? "holds" : "VIOLATED") << '\n';
  return sound ? kOk : kOther;
}

int cmd_mpc(const RunConfig& c, CLI::App* sub, std::ostream& out) {
  ChauffeurParams prm = c.chauffeur;
  if (c.xp0.size() != 3 || c.xe0.size() != 2) throw ConfigError("--xp0 takes 3 values, --xe0 takes 2");
  prm.x_p0 = Eigen::Vector3d(c.xp0[0], c.xp0[1], c.xp0[2]);
  prm.x_e0 = Eigen::Vector2d(c.xe0[0], c.xe0[1]);
  prm.validate();

  MpcOptions opts = default_mpc_options();
  opts.ip = c.ip;
  opts.ip.newton.max_iters = c.mpc_max_iters;
  opts.ip.verify_scaling_every = 0;
  opts.warm_start = !c.cold;

  std::vector<Formulation> forms;
  if (c.mode == "both") {
    forms = {Formulation::Simultaneous, Formulation::Sequential};
  } else {
    forms = {parse_formulation(c.mode)};
  }
  std::vector<EnforceSchedule> schedules;
  for (const auto& e : c.enforce) schedules.push_back(EnforceSchedule::parse(e));

  const fs::path dir = prepare_out_dir(c);
  out.precision(6);
  const bool run_episodes = c.scaling.empty() || sub->get_option("--enforce-instability")->count();
  if (run_episodes) {
    opts.form = forms.front();
    std::vector<EpisodeLog> logs;
    for (const auto& sch : schedules) {
      logs.push_back(run_mpc_episode(prm, sch, opts));
      const EpisodeLog& log = logs.back();
      const std::string name =
          schedules.size() == 1 ? "episode.csv" : "episode_" + sch.str() + ".csv";
      auto f = open_out(dir / name);
      write_episode_csv(f, log);
      out << "enforce=" << sch.str() << " mean_cost=" << log.mean_cost()
          << " local_minmax=" << log.count(SolveStatus::LocalMinmax)
          << " other=" << log.count(SolveStatus::EquilibriumNotMinmax)
          << " fallbacks=" << log.fallbacks() << " -> " << (dir / name).string() << '\n';
      if (sch.mode == EnforceSchedule::Mode::After) {
        out << "regime change at t=" << sch.after
            << ": mean_cost before=" << log.mean_cost(0, sch.after)
            << " after=" << log.mean_cost(sch.after, prm.n_steps) << '\n';
      }
    }
    if (c.svg) {
      std::vector<const EpisodeLog*> ptrs;
      for (const auto& l : logs) ptrs.push_back(&l);
      auto f = open_out(dir / "episode.svg");
      write_episode_svg(f, ptrs);
    }
  }
  if (!c.scaling.empty()) {
    const auto rows = scaling_study(prm, c.scaling, forms, opts, c.repeats);
    auto f = open_out(dir / "scaling.csv");
    write_scaling_csv(f, rows);
    write_scaling_csv(out, rows);
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Minmax solvers: modified Newton, interior point, baselines and the pursuit-evasion MPC"};
  app.set_config("--config", "", "key=value config file (flags take precedence)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.add_option("--out-dir", c.out_dir, "Output directory")
      ->envname("MINMAX_OUT_DIR")
      ->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
  app.add_flag("--trace", c.trace, "Write per-iteration trace.csv");

  auto* solve = app.add_subcommand("solve", "Solve one built-in problem");
  solve->add_option("--problem", c.problem, "Problem name, optionally with key=value parameters");
  solve->add_option("--fixture", c.fixture_path, "File whose first line is a problem fixture");
  solve->add_option("--solver", c.solver, "alg1, pure_newton or gda")->capture_default_str();
  solve->add_option("--x0", c.x0, "Start x (one value is broadcast)")->delimiter(',')->capture_default_str();
  solve->add_option("--y0", c.y0, "Start y (one value is broadcast)")->delimiter(',')->capture_default_str();
  solve->add_option("--gda-alpha-x", c.gda.alpha_x, "GDA descent step")->capture_default_str();
  solve->add_option("--gda-alpha-y", c.gda.alpha_y, "GDA ascent step")->capture_default_str();
  add_newton_flags(solve, c);
  add_ip_flags(solve, c);

  auto* bench = app.add_subcommand("bench", "Multistart comparison of pure Newton, GDA and alg1");
  bench->add_option("--trials", c.trials, "Starts per function")->capture_default_str();
  bench->add_option("--functions", c.functions, "Functions to run")->delimiter(',')->capture_default_str();
  bench->add_option("--solvers", c.solvers, "Solvers to run")->delimiter(',')->capture_default_str();
  bench->add_option("--box-lo", c.box_lo, "Lower corner of the start box")->capture_default_str();
  bench->add_option("--box-hi", c.box_hi, "Upper corner of the start box")->capture_default_str();
  bench->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  bench->add_option("--gda-alpha-x", c.gda.alpha_x, "GDA descent step")->capture_default_str();
  bench->add_option("--gda-alpha-y", c.gda.alpha_y, "GDA ascent step")->capture_default_str();
  bench->add_option("--gda-max-iters", c.gda.max_iters, "GDA iteration cap")->capture_default_str();
  bench->add_option("--gda-step", c.gda_steps, "Per-function GDA steps, name:alpha_x,alpha_y (f2 defaults to 0.005,0.05)");
  add_newton_flags(bench, c);

  auto* mpc = app.add_subcommand("mpc", "Pursuit-evasion MPC episodes and horizon scaling");
  mpc->add_option("--enforce-instability", c.enforce, "on, off or after:N; several run in turn")
      ->delimiter(',')
      ->capture_default_str();
  mpc->add_option("--scaling", c.scaling, "Horizons for the scaling study, ascending")->delimiter(',');
  mpc->add_option("--mode", c.mode, "simultaneous, sequential or both")->capture_default_str();
  mpc->add_option("--repeats", c.repeats, "Timing repeats per scaling cell")->capture_default_str();
  mpc->add_flag("--svg", c.svg, "Also write episode.svg");
  mpc->add_flag("--cold-start", c.cold, "Start every horizon solve from scratch");
  mpc->add_option("--horizon", c.chauffeur.T, "Horizon T")->capture_default_str();
  mpc->add_option("--steps", c.chauffeur.n_steps, "Episode length")->capture_default_str();
  mpc->add_option("--v", c.chauffeur.v, "Pursuer speed")->capture_default_str();
  mpc->add_option("--u-max", c.chauffeur.u_max, "Steering bound")->capture_default_str();
  mpc->add_option("--d-max", c.chauffeur.d_max, "Evader speed bound")->capture_default_str();
  mpc->add_option("--gamma-u", c.chauffeur.gamma_u, "Steering weight")->capture_default_str();
  mpc->add_option("--gamma-d", c.chauffeur.gamma_d, "Evader effort weight")->capture_default_str();
  mpc->add_option("--xp0", c.xp0, "Pursuer start x,y,heading")->delimiter(',')->capture_default_str();
  mpc->add_option("--xe0", c.xe0, "Evader start x,y")->delimiter(',')->capture_default_str();
  add_newton_flags(mpc, c, &c.mpc_max_iters);
  add_ip_flags(mpc, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(c, out);
    if (*bench) return cmd_bench(c, out);
    return cmd_mpc(c, mpc, out);
  } catch (const UnknownProblem& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("minmax");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace minmax::cli
