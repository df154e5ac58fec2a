#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "minmax/baselines.hpp"
#include "minmax/newton.hpp"

namespace minmax {

enum class SolverId { Alg1, PureNewton, Gda };

const char* to_string(SolverId s);
/// Accepts "alg1", "pure_newton" and "gda"; throws ConfigError otherwise.
SolverId parse_solver(const std::string& s);

struct TrialResult {
  std::string function;
  SolverId solver = SolverId::Alg1;
  int trial = 0;
  double x0 = 0.0, y0 = 0.0;
  SolveStatus status = SolveStatus::MaxIters;
  int iters = 0;
  double x = 0.0, y = 0.0;
  bool singular_hessian = false;

  /// Terminated at a stationary point.
  bool equilibrium() const {
    return status == SolveStatus::LocalMinmax || status == SolveStatus::EquilibriumNotMinmax;
  }
  bool minmax() const { return status == SolveStatus::LocalMinmax; }
};

struct SummaryRow {
  std::string function;
  SolverId solver = SolverId::Alg1;
  int trials = 0;
  int eq = 0;
  int minmax = 0;
  /// Mean iterations over minmax-terminated trials; NaN when there are none.
  double mean_iters = 0.0;
};

struct BenchConfig {
  std::vector<std::string> functions = {"f1", "f2", "f3", "f4"};
  std::vector<SolverId> solvers = {SolverId::PureNewton, SolverId::Gda, SolverId::Alg1};
  int n_trials = 1000;
  unsigned long long seed = 1;
  double box_lo = -3.0;
  double box_hi = 3.0;
  NewtonOptions newton;
  GdaOptions gda;
  /// Per-function (alpha_x, alpha_y) for GDA; functions not listed use `gda`.
  /// f2 only converges under GDA with the minimizer ten times slower.
  std::map<std::string, std::pair<double, double>> gda_steps = {{"f2", {0.005, 0.05}}};
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
};

struct BenchSummary {
  std::vector<SummaryRow> rows;
  std::vector<TrialResult> trials;

  const SummaryRow& row(const std::string& function, SolverId solver) const;
};

/// Uniform points in [lo, hi]^2 from a 64-bit Mersenne Twister seeded with `seed`.
std::vector<std::pair<double, double>> init_points(int n, unsigned long long seed, double lo,
                                                   double hi);

/// Runs every solver on every function from the same start points.
BenchSummary run_benchmark(const BenchConfig& cfg);

void write_trials_csv(std::ostream& os, const BenchSummary& s);
void write_summary_csv(std::ostream& os, const BenchSummary& s);
/// JSON record of the configuration and the per-row counts.
void write_manifest(std::ostream& os, const BenchConfig& cfg, const BenchSummary& s);

/// Runs one solver from one start point on a named problem.
TrialResult run_trial(const MinmaxProblem& p, SolverId solver, double x0, double y0,
                      const NewtonOptions& newton, const GdaOptions& gda);

}  // namespace minmax
