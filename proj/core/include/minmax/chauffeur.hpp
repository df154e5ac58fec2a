#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "minmax/interior_point.hpp"

namespace minmax {

/// Homicidal-chauffeur pursuit-evasion: a Dubins-car pursuer (position and
/// heading, steered by u) chases a point evader moved directly by d.
struct ChauffeurParams {
  double v = 0.3;        // pursuer forward speed
  double u_max = 0.5;    // |u| bound
  double d_max = 0.2;    // ||d|| bound
  double gamma_u = 0.1;  // steering weight
  double gamma_d = 1.0;  // evader effort weight
  int T = 20;            // horizon
  int n_steps = 50;      // episode length
  Eigen::Vector3d x_p0{0.0, 0.0, 0.0};
  Eigen::Vector2d x_e0{1.0, 0.5};

  void validate() const;
};

enum class Formulation {
  /// Trajectories are decision variables tied by equality constraints.
  Simultaneous,
  /// Trajectories are substituted out; only the controls remain.
  Sequential,
};

const char* to_string(Formulation f);
Formulation parse_formulation(const std::string& s);

Eigen::Vector3d pursuer_step(const Eigen::Vector3d& xp, double u, double v);
Eigen::Vector2d evader_step(const Eigen::Vector2d& xe, const Eigen::Vector2d& d);

/// Index map of the simultaneous layout. Stage i holds the control applied at
/// step i and the state reached after it:
///   x = [u_0, px_1, py_1, th_1, u_1, px_2, ...],  y = [dx_0, dy_0, ex_1, ey_1, ...].
struct StageIndex {
  static Index u(int i) { return 4 * i; }
  static Index pursuer(int i) { return 4 * i + 1; }  // px; py and heading follow
  static Index d(int i) { return 4 * i; }
  static Index evader(int i) { return 4 * i + 2; }  // ex; ey follows
};

/// The horizon problem
///   min_u max_d  sum_i ||p_{i+1} - e_{i+1}||^2 + gamma_u u_i^2 - gamma_d ||d_i||^2
/// from the current states, with u_i^2 <= u_max^2 and ||d_i||^2 <= d_max^2.
MinmaxProblem build_horizon_problem(const ChauffeurParams& prm, const Eigen::Vector3d& xp,
                                    const Eigen::Vector2d& xe, Formulation form);

/// Primal (x, y) of a horizon problem for given control sequences, with the
/// trajectories rolled out when the formulation carries them.
std::pair<Vec, Vec> horizon_primal(const ChauffeurParams& prm, const Eigen::Vector3d& xp,
                                   const Eigen::Vector2d& xe, const Vec& u, const Vec& d,
                                   Formulation form);

/// Whether the instability growth runs at episode step t.
struct EnforceSchedule {
  enum class Mode { On, Off, After };
  Mode mode = Mode::On;
  int after = 0;

  bool active(int t) const {
    return mode == Mode::On || (mode == Mode::After && t >= after);
  }
  /// "on", "off" or "after:N".
  static EnforceSchedule parse(const std::string& s);
  std::string str() const;
};

struct MpcOptions {
  IpOptions ip;
  Formulation form = Formulation::Simultaneous;
  bool warm_start = true;
};

/// Interior-point settings used for horizon solves unless overridden.
MpcOptions default_mpc_options();

struct MpcStep {
  int t = 0;
  Eigen::Vector3d xp = Eigen::Vector3d::Zero();  // state before the controls
  Eigen::Vector2d xe = Eigen::Vector2d::Zero();
  double u = 0.0;
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  double cost = 0.0;  // ||p(t+1) - e(t+1)||^2 after applying (u, d)
  SolveStatus status = SolveStatus::MaxIters;
  int iters = 0;
  bool enforce = true;
  /// The solve failed and the previous controls were reused.
  bool fallback = false;
  int instability_activations = 0;
  std::string note;
};

struct EpisodeLog {
  ChauffeurParams params;
  EnforceSchedule schedule;
  std::vector<MpcStep> steps;
  Eigen::Vector3d final_xp = Eigen::Vector3d::Zero();
  Eigen::Vector2d final_xe = Eigen::Vector2d::Zero();

  double mean_cost() const;
  double mean_cost(int from, int to) const;  // over steps t in [from, to)
  int count(SolveStatus s) const;
  int fallbacks() const;
};

EpisodeLog run_mpc_episode(const ChauffeurParams& prm, const EnforceSchedule& sched,
                           const MpcOptions& opts = default_mpc_options());

struct ScalingRow {
  Formulation form = Formulation::Simultaneous;
  int T = 0;
  Index n = 0;  // primal-dual size
  SolveStatus status = SolveStatus::MaxIters;
  int iters = 0;
  double sec_per_iter = 0.0;  // best of the repeats
  Index nnz_hessian = 0;      // stored lower-triangle entries of the KKT matrix
  /// Fill of the factor at the starting iterate, a property of the pattern.
  Index nnz_factor = 0;
  /// Fill at the last step, after any value-driven reordering.
  Index nnz_factor_final = 0;
  long factorizations = 0;
  std::string note;
};

/// One cold-start horizon solve per (formulation, T) from the episode's
/// initial states. Failures are recorded in the row, not thrown.
std::vector<ScalingRow> scaling_study(const ChauffeurParams& prm, const std::vector<int>& T_list,
                                      const std::vector<Formulation>& forms,
                                      const MpcOptions& opts = default_mpc_options(),
                                      int repeats = 3);

void write_episode_csv(std::ostream& os, const EpisodeLog& log);
void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);
/// Trajectories of both players as an SVG drawing.
void write_episode_svg(std::ostream& os, const std::vector<const EpisodeLog*>& logs);

}  // namespace minmax
