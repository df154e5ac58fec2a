#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "minmax/certify.hpp"
#include "minmax/errors.hpp"
#include "minmax/newton.hpp"
#include "minmax/test_functions.hpp"

using namespace minmax;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

double spectral_radius(const Eigen::MatrixXd& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

Dims two_by_two() {
  Dims d;
  d.nx = 1;
  d.ny = 1;
  return d;
}

Eigen::MatrixXd hessian_of(double hxx, double hxy, double hyy) {
  Eigen::Matrix2d h;
  h << hxx, hxy, hxy, hyy;
  return h;
}

}  // namespace

TEST(Newton, StepOnBilinearGameLandsOnTheSaddle) {
  const auto p = builtin_problem("f4");
  const auto [x, y] = newton_step(p, v1(2.0), v1(3.0), {});
  EXPECT_NEAR(x(0), 0.0, 1e-14);
  EXPECT_NEAR(y(0), 0.0, 1e-14);
}

TEST(Newton, StepOnCubic) {
  // x - (3x^2 - 3) / 6x at x = 2.
  const auto p = builtin_problem("cubic_min");
  const auto [x, y] = newton_step(p, v1(2.0), Vec(), {});
  EXPECT_NEAR(x(0), 1.25, 1e-14);
  EXPECT_EQ(y.size(), 0);
  // With eps_x = 4: 2 - 9 / 16.
  EXPECT_NEAR(newton_step(p, v1(2.0), Vec(), {4.0, 0.0}).first(0), 2.0 - 9.0 / 16.0, 1e-14);
}

TEST(Newton, IterationJacobianMatchesDefinition) {
  const Eigen::MatrixXd h = hessian_of(-0.5, 1.0, -1.0);
  const Modification m{0.3, 3.0};
  const Eigen::MatrixXd e = Eigen::Vector2d(0.3, -3.0).asDiagonal();
  const Eigen::MatrixXd want =
      Eigen::MatrixXd::Identity(2, 2) - (h + e).inverse() * h;
  EXPECT_LT((iteration_jacobian(h, two_by_two(), m) - want).cwiseAbs().maxCoeff(), 1e-13);
  // Trace 3 and determinant 4.5, so eigenvalues 1.5 +- 1.5i.
  const auto eig = iteration_jacobian(h, two_by_two(), m).eigenvalues();
  EXPECT_NEAR(eig(0).real(), 1.5, 1e-12);
  EXPECT_NEAR(std::abs(eig(0).imag()), 1.5, 1e-12);
}

TEST(Newton, ClassifyEquilibria) {
  const auto saddle = quadratic_problem(2.0, 0.5, -2.0);
  EXPECT_EQ(classify_equilibrium(saddle, v1(0), v1(0)).kind, Classification::LocalMinmax);
  // Both directions concave: y is a local max but x is not a local min.
  const auto concave = quadratic_problem(-1.0, 0.5, -1.0);
  EXPECT_EQ(classify_equilibrium(concave, v1(0), v1(0)).kind, Classification::Other);
  // y block zero.
  const auto bilinear = quadratic_problem(1.0, 1.0, 0.0);
  const auto c = classify_equilibrium(bilinear, v1(0), v1(0));
  EXPECT_EQ(c.kind, Classification::Other);
  EXPECT_TRUE(c.singular_hessian);
}

TEST(Newton, StabilityMarginFormula) {
  // eps_x - eps_y * hxy^2 / hyy^2 for one-dimensional blocks.
  const auto p = quadratic_problem(1.0, 2.0, -1.0);
  EXPECT_NEAR(stability_margin_diagnostic(p, v1(0), v1(0), {5.0, 1.0}), 1.0, 1e-12);
  EXPECT_NEAR(stability_margin_diagnostic(p, v1(0), v1(0), {1.0, 0.5}), -1.0, 1e-12);
}

TEST(Newton, SelectionMakesMinmaxAttractingAndOthersRepelling) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int minmax_seen = 0, other_seen = 0;
  for (int k = 0; k < 200; ++k) {
    const double hxx = u(rng), hxy = u(rng), hyy = u(rng);
    const Eigen::MatrixXd h = hessian_of(hxx, hxy, hyy);
    const double schur = hxx - hxy * hxy / hyy;
    if (std::abs(hyy) < 0.1 || std::abs(schur) < 0.1) continue;
    const bool minmax = hyy < 0 && schur > 0;
    EpsilonSelection sel;
    try {
      sel = select_epsilons_unconstrained(SymMatrix::from_dense(h), two_by_two(), {});
    } catch (const EpsilonCapExceeded&) {
      ADD_FAILURE() << "cap at " << hxx << ' ' << hxy << ' ' << hyy;
      continue;
    }
    const double rho = spectral_radius(iteration_jacobian(h, two_by_two(), sel.mod));
    if (minmax) {
      ++minmax_seen;
      EXPECT_LT(rho, 1.0) << hxx << ' ' << hxy << ' ' << hyy;
    } else {
      ++other_seen;
      EXPECT_GT(rho, 1.0) << hxx << ' ' << hxy << ' ' << hyy;
    }
  }
  EXPECT_GT(minmax_seen, 10);
  EXPECT_GT(other_seen, 10);
}

TEST(Newton, CounterexampleSelectionsBehave) {
  const auto rep = certify_counterexamples(true);
  // 1.5x^2 - 4xy + y^2 and -0.25x^2 + xy - 0.5y^2.
  EXPECT_LT((rep.stable_non_minmax.hessian - Eigen::Matrix2d(hessian_of(3, -4, 2))).norm(), 1e-14);
  EXPECT_LT((rep.unstable_minmax.hessian - Eigen::Matrix2d(hessian_of(-0.5, 1, -1))).norm(), 1e-14);
  const auto radius = [](const CounterexampleCase& c, const Modification& m) {
    return spectral_radius(iteration_jacobian(c.hessian, two_by_two(), m));
  };
  EXPECT_LT(radius(rep.stable_non_minmax, rep.stable_non_minmax.fooled), 1.0);
  EXPECT_GT(radius(rep.stable_non_minmax, rep.stable_non_minmax.selected), 1.0);
  EXPECT_GT(radius(rep.unstable_minmax, rep.unstable_minmax.fooled), 1.0);
  EXPECT_LT(radius(rep.unstable_minmax, rep.unstable_minmax.selected), 1.0);
  EXPECT_TRUE(rep.passed);
}

TEST(Newton, SolveFindsSaddleOfQuadratic) {
  const auto p = quadratic_problem(2.0, 1.0, -3.0, 1.0, -2.0);
  const auto r = newton_solve(p, v1(4.0), v1(-5.0));
  ASSERT_EQ(r.status, SolveStatus::LocalMinmax);
  // Gradient zero: 2x + y + 1 = 0 and x - 3y - 2 = 0.
  Eigen::Matrix2d a;
  a << 2, 1, 1, -3;
  const Eigen::Vector2d s = a.inverse() * Eigen::Vector2d(-1, 2);
  EXPECT_NEAR(r.x(0), s(0), 1e-6);
  EXPECT_NEAR(r.y(0), s(1), 1e-6);
}

TEST(Newton, CubicMinimizationRegimes) {
  const auto p = builtin_problem("cubic_min");
  EXPECT_EQ(newton_solve(p, v1(0.0), Vec()).status, SolveStatus::LocalMinmax);
  EXPECT_NEAR(newton_solve(p, v1(-0.5), Vec()).x(0), 1.0, 1e-5);
  EXPECT_EQ(newton_solve(p, v1(-2.0), Vec()).status, SolveStatus::Diverged);
}

TEST(Newton, StatusNamesRoundTrip) {
  for (auto s : {SolveStatus::LocalMinmax, SolveStatus::EquilibriumNotMinmax, SolveStatus::MaxIters,
                 SolveStatus::Diverged, SolveStatus::SingularFailure,
                 SolveStatus::InfeasibleStart}) {
    EXPECT_EQ(parse_status(to_string(s)), s);
  }
  EXPECT_THROW(parse_status("bogus"), std::invalid_argument);
}
