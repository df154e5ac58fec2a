#include <gtest/gtest.h>

#include "minmax/errors.hpp"
#include "minmax/interior_point.hpp"
#include "minmax/test_functions.hpp"

using namespace minmax;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST(InteriorPoint, FractionToBoundary) {
  Dims d;
  d.nx = 1;
  d.mx = 1;
  auto z = PrimalDualPoint::zeros(d);
  z.sx = v1(1.0);
  z.lambda_x = v1(1.0);
  auto dz = PrimalDualPoint::zeros(d);
  dz.sx = v1(-2.0);
  EXPECT_DOUBLE_EQ(fraction_to_boundary(z, dz, 0.995), 0.4975);
  dz.sx = v1(0.5);  // moving away from the boundary
  EXPECT_DOUBLE_EQ(fraction_to_boundary(z, dz, 0.995), 1.0);
  dz.lambda_x = v1(-10.0);
  EXPECT_DOUBLE_EQ(fraction_to_boundary(z, dz, 0.995), 0.0995);
}

TEST(InteriorPoint, InitialPointIsInterior) {
  const auto p = builtin_problem("constrained_fixture");
  const auto z = initial_point(p, v1(0.0), v1(3.0));
  EXPECT_TRUE(z.interior());
  // s = max(-F, 1): F_x = 1 - x gives s_x = 1; F_y = y - 0.5 gives s_y = 1.
  EXPECT_DOUBLE_EQ(z.sx(0), 1.0);
  EXPECT_DOUBLE_EQ(z.sy(0), 1.0);
  EXPECT_DOUBLE_EQ(z.lambda_x(0), 1.0);
}

TEST(InteriorPoint, StepReducesResidualOnBoundedSquare) {
  // min x^2 subject to x >= 1.
  const auto p = builtin_problem("bounded_square");
  auto z = initial_point(p, v1(3.0), Vec());
  const double b = 0.1;
  const double before = assemble_residual(p, z, b).cwiseAbs().maxCoeff();
  const auto next = ip_step(p, z, b, {});
  EXPECT_TRUE(next.interior());
  EXPECT_LT(assemble_residual(p, next, b).cwiseAbs().maxCoeff(), before);
}

TEST(InteriorPoint, ConstrainedFixtureReachesKnownSolution) {
  const auto p = builtin_problem("constrained_fixture");
  IpOptions opts;
  opts.newton.record_trace = true;
  const auto r = ip_solve(p, initial_point(p, v1(3.0), v1(-2.0)), opts);
  ASSERT_EQ(r.status, SolveStatus::LocalMinmax) << r.note;
  EXPECT_NEAR(r.z.x(0), 1.0, 1e-5);
  EXPECT_NEAR(r.z.y(0), 0.0, 1e-5);
  EXPECT_NEAR(r.z.lambda_x(0), 2.0, 1e-4);
  EXPECT_LE(assemble_residual(p, r.z, opts.b_min).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_TRUE(r.complementarity_ok);

  EXPECT_GT(r.positivity_checks, 0);
  EXPECT_LT(r.max_scaling_error, 1e-10);
  ASSERT_FALSE(r.trace.empty());
  for (size_t k = 1; k < r.trace.size(); ++k) {
    EXPECT_LE(r.trace[k].b, r.trace[k - 1].b);
    EXPECT_GT(r.trace[k].alpha, 0.0);
  }
}

TEST(InteriorPoint, UnconstrainedProblemReducesToNewton) {
  const auto p = quadratic_problem(2.0, 1.0, -3.0);
  const auto r = ip_solve(p, initial_point(p, v1(1.0), v1(1.0)));
  EXPECT_EQ(r.status, SolveStatus::LocalMinmax);
  EXPECT_NEAR(r.z.x(0), 0.0, 1e-6);
  EXPECT_NEAR(r.z.y(0), 0.0, 1e-6);
}

TEST(InteriorPoint, NonInteriorStartIsRejected) {
  const auto p = builtin_problem("constrained_fixture");
  auto z = initial_point(p, v1(3.0), v1(0.0));
  z.lambda_y(0) = -1.0;
  const auto r = ip_solve(p, z);
  EXPECT_EQ(r.status, SolveStatus::InfeasibleStart);
}
