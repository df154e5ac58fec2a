#include <gtest/gtest.h>

#include <sstream>

#include "minmax/bench_harness.hpp"
#include "minmax/certify.hpp"
#include "minmax/errors.hpp"
#include "minmax/test_functions.hpp"

using namespace minmax;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

BenchConfig small_config(int trials) {
  BenchConfig c;
  c.n_trials = trials;
  c.threads = 2;
  return c;
}

}  // namespace

TEST(BenchHarness, F1DerivativesAtOrigin) {
  const auto p = builtin_problem("f1");
  const Eigen::MatrixXd h = hessian_matrix(p, v1(0), v1(0)).to_dense();
  EXPECT_DOUBLE_EQ(h(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(h(1, 0), 4.0);
  EXPECT_DOUBLE_EQ(h(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(h(1, 1), -2.0);
  // 2 - 1 + 4 + 4/3 - 1/4 at (1, 1).
  EXPECT_NEAR(p.objective(v1(1), v1(1)), 2.0 - 1.0 + 4.0 + 4.0 / 3.0 - 0.25, 1e-14);
}

TEST(BenchHarness, BilinearAndF2Values) {
  const auto f4 = builtin_problem("f4");
  Vec gx, gy;
  f4.gradient(v1(2.5), v1(-1.5), gx, gy);
  EXPECT_DOUBLE_EQ(gx(0), -1.5);
  EXPECT_DOUBLE_EQ(gy(0), 2.5);
  EXPECT_DOUBLE_EQ(f4.objective(v1(2.5), v1(-1.5)), -3.75);
  EXPECT_NEAR(builtin_problem("f2").objective(v1(0), v1(0)), 0.0, 1e-15);
}

TEST(BenchHarness, InitPointsAreSeededAndInBox) {
  const auto a = init_points(50, 42, -3.0, 3.0);
  const auto b = init_points(50, 42, -3.0, 3.0);
  const auto c = init_points(50, 43, -3.0, 3.0);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& [x, y] : a) {
    EXPECT_GE(x, -3.0);
    EXPECT_LE(x, 3.0);
    EXPECT_GE(y, -3.0);
    EXPECT_LE(y, 3.0);
  }
}

TEST(BenchHarness, BenchmarkIsDeterministicAcrossThreadCounts) {
  auto c1 = small_config(25);
  auto c2 = small_config(25);
  c2.threads = 1;
  const auto s1 = run_benchmark(c1);
  const auto s2 = run_benchmark(c2);
  std::ostringstream o1, o2;
  write_trials_csv(o1, s1);
  write_trials_csv(o2, s2);
  EXPECT_EQ(o1.str(), o2.str());
  EXPECT_EQ(s1.rows.size(), 12u);
  for (const auto& r : s1.rows) {
    EXPECT_EQ(r.trials, 25);
    EXPECT_LE(r.minmax, r.eq);
  }
}

TEST(BenchHarness, SolversShareStartPoints) {
  const auto s = run_benchmark(small_config(5));
  for (const auto& t : s.trials) {
    for (const auto& u : s.trials) {
      if (t.function == u.function && t.trial == u.trial) {
        EXPECT_EQ(t.x0, u.x0);
        EXPECT_EQ(t.y0, u.y0);
      }
    }
  }
}

TEST(BenchHarness, SummaryCsvAndManifest) {
  auto c = small_config(3);
  c.functions = {"f4"};
  const auto s = run_benchmark(c);
  std::ostringstream csv, man;
  write_summary_csv(csv, s);
  write_manifest(man, c, s);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "function,solver,trials,eq,minmax,mean_iters");
  EXPECT_NE(man.str().find("\"seed\": 1"), std::string::npos);
  EXPECT_EQ(s.row("f4", SolverId::PureNewton).minmax, 3);
  EXPECT_THROW(s.row("f9", SolverId::Alg1), std::out_of_range);
}

TEST(BenchHarness, SolverNames) {
  EXPECT_EQ(parse_solver("alg1"), SolverId::Alg1);
  EXPECT_EQ(parse_solver("gda"), SolverId::Gda);
  EXPECT_THROW(parse_solver("adam"), ConfigError);
  EXPECT_THROW(run_benchmark(small_config(0)), ConfigError);
}

TEST(BenchHarness, CounterexampleCertification) {
  const auto rep = certify_counterexamples();
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.seconds, 1.0);
  for (const auto& line : rep.checks) EXPECT_EQ(line.rfind("ok", 0), 0u) << line;
}
