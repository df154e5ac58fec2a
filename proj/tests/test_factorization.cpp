#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "minmax/epsilon.hpp"
#include "minmax/errors.hpp"
#include "minmax/ldlt.hpp"

using namespace minmax;

namespace {

Inertia eigen_inertia(const Eigen::MatrixXd& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Inertia in;
  for (Index i = 0; i < a.rows(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > tol) ++in.pos;
    else if (l < -tol) ++in.neg;
    else ++in.zero;
  }
  return in;
}

// Q diag(lambda) Q' with |lambda| >= gap and random signs.
Eigen::MatrixXd random_symmetric(Index n, double gap, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> mag(gap, 10.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lam(n);
  for (Index i = 0; i < n; ++i) lam(i) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
  Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd permuted(const Eigen::MatrixXd& a, const std::vector<Index>& perm) {
  const Index n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = a(perm[size_t(i)], perm[size_t(j)]);
  return out;
}

// Banded indefinite matrix in sparse storage.
SymMatrix banded(Index n, Index bw, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> tr;
  for (Index i = 0; i < n; ++i) {
    tr.emplace_back(i, i, (i % 3 == 0 ? -4.0 : 4.0) + u(rng));
    for (Index k = 1; k <= bw && i + k < n; ++k) tr.emplace_back(i + k, i, u(rng));
  }
  return SymMatrix::from_triplets(n, tr, SymMatrix::Storage::Sparse);
}

}  // namespace

TEST(Factorization, DiagonalMatrixGivesItsDiagonal) {
  Eigen::MatrixXd a = Eigen::Vector4d(3.0, -2.0, 5.0, -0.5).asDiagonal();
  const auto f = ldlt_factor(SymMatrix::from_dense(a), GammaPolicy::none(4));
  Eigen::VectorXd d = f.d();
  std::sort(d.data(), d.data() + d.size());
  EXPECT_NEAR(d(0), -2.0, 1e-14);
  EXPECT_NEAR(d(1), -0.5, 1e-14);
  EXPECT_NEAR(d(2), 3.0, 1e-14);
  EXPECT_NEAR(d(3), 5.0, 1e-14);
  EXPECT_EQ(inertia(f), (Inertia{2, 2, 0}));
}

TEST(Factorization, ZeroDiagonalNeedsSignedRegularization) {
  Eigen::Matrix2d a;
  a << 0.0, 1.0, 1.0, 0.0;
  const auto m = SymMatrix::from_dense(a);
  EXPECT_THROW(ldlt_factor(m, GammaPolicy::none(2)), FactorizationBreakdown);

  GammaPolicy g;
  g.signs = {1, -1};
  g.gamma = 1e-8;
  const auto f = ldlt_factor(m, g);
  EXPECT_EQ(inertia(f), (Inertia{1, 1, 0}));
}

TEST(Factorization, DenseReconstructionAndSolve) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd a = random_symmetric(20, 0.1, rng);
  const auto f = ldlt_factor(SymMatrix::from_dense(a), GammaPolicy::none(20));
  const Eigen::MatrixXd pa = permuted(a, f.permutation());
  EXPECT_LT((f.reconstruct() - pa).cwiseAbs().maxCoeff(), 1e-10);

  Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(20, -1.0, 2.0);
  const Eigen::VectorXd want = a.fullPivLu().solve(rhs);
  const Eigen::VectorXd got = solve_inplace(f, rhs);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factorization, SparseReconstructionAndSolve) {
  std::mt19937_64 rng(11);
  const SymMatrix m = banded(80, 3, rng);
  ASSERT_TRUE(m.is_sparse());
  const auto f = ldlt_factor(m, GammaPolicy::none(80));
  ASSERT_TRUE(f.is_sparse());
  const Eigen::MatrixXd a = m.to_dense();
  EXPECT_LT((f.reconstruct() - permuted(a, f.permutation())).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(inertia(f), eigen_inertia(a, 1e-12));

  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(80);
  const Eigen::VectorXd got = solve_inplace(f, rhs);
  EXPECT_LT((a * got - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factorization, InertiaMatchesEigenvaluesOnRandomMatrices) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = size(rng);
    const Eigen::MatrixXd a = random_symmetric(n, 1e-4, rng);
    const auto m = SymMatrix::from_dense(a);
    const auto f = ldlt_factor(m, GammaPolicy::uniform(n, 1, GammaPolicy::default_gamma(m)));
    ASSERT_EQ(inertia(f), eigen_inertia(a, 0.0)) << "trial " << trial << " n " << n;
  }
}

TEST(Factorization, SylvesterInertiaInvariantUnderCongruence) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd a = random_symmetric(12, 0.5, rng);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(12, 12);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (Index i = 0; i < 12; ++i)
    for (Index j = 0; j < i; ++j) s(i, j) = u(rng);
  const Eigen::MatrixXd b = s * a * s.transpose();
  const auto fa = ldlt_factor(SymMatrix::from_dense(a), GammaPolicy::none(12));
  const auto fb = ldlt_factor(SymMatrix::from_dense(0.5 * (b + b.transpose())),
                              GammaPolicy::none(12));
  EXPECT_EQ(inertia(fa), inertia(fb));
}

TEST(Factorization, SingularSolveThrows) {
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  GammaPolicy g = GammaPolicy::uniform(3, 1, 0.0);
  FactorOptions opt;
  opt.zero_tol = 1e-12;
  // Exact zero pivot: either breakdown at factor time or a singular solve.
  try {
    const auto f = ldlt_factor(SymMatrix::from_dense(a), g, opt);
    EXPECT_EQ(inertia(f).zero, 1);
    EXPECT_THROW(solve_inplace(f, Eigen::Vector3d::Ones()), SingularSystem);
  } catch (const FactorizationBreakdown&) {
    SUCCEED();
  }
}

TEST(Factorization, TridiagonalHasNoFill) {
  const Index n = 100;
  std::vector<Triplet> tr;
  for (Index i = 0; i < n; ++i) {
    tr.emplace_back(i, i, 2.0);
    if (i + 1 < n) tr.emplace_back(i + 1, i, -1.0);
  }
  const auto m = SymMatrix::from_triplets(n, tr, SymMatrix::Storage::Sparse);
  const auto sym = symbolic_analyze(m.lower(), minimum_degree_order(m.lower()));
  EXPECT_EQ(sym->nnz_l(), n - 1);
}

TEST(Factorization, MinimumDegreeFillGrowsLinearlyForBandedPatterns) {
  std::mt19937_64 rng(1);
  const auto small = banded(120, 4, rng);
  const auto large = banded(360, 4, rng);
  const Index a = symbolic_analyze(small.lower(), minimum_degree_order(small.lower()))->nnz_l();
  const Index b = symbolic_analyze(large.lower(), minimum_degree_order(large.lower()))->nnz_l();
  EXPECT_LE(double(b) / double(a), 3.5);
}

TEST(Factorization, PivotOrderAvoidsCollapsedPivots) {
  // Node 0 has the lowest degree but a zero diagonal; a purely structural
  // order eliminates it first and gets a pivot of size gamma.
  const Index n = 3;
  std::vector<Triplet> tr = {{1, 0, 1.0}, {1, 1, 0.0}, {2, 1, 1.0}, {2, 2, 1.0}, {0, 0, 0.0}};
  const auto m = SymMatrix::from_triplets(n, tr, SymMatrix::Storage::Sparse);
  const auto order = pivot_order(m, Eigen::VectorXd::Zero(n));
  EXPECT_NE(order.front(), 0);

  GammaPolicy g = GammaPolicy::uniform(n, 1, 1e-8);
  FactorOptions opt;
  opt.symbolic = symbolic_analyze(m.lower(), order);
  const auto f = ldlt_factor(m, g, opt);
  EXPECT_EQ(f.collapsed_pivots(), 0);
  EXPECT_EQ(inertia(f), eigen_inertia(m.to_dense(), 1e-12));
}

TEST(Factorization, OracleRobustInertiaRejectsNearZeroEigenvalues) {
  Dims d;
  d.nx = 1;
  d.ny = 1;
  InertiaOracle oracle(d);
  oracle.set_scale(1.0);
  Eigen::Matrix2d h;
  h << 1.0, 0.0, 0.0, 0.0;  // y block identically zero
  const auto m = SymMatrix::from_dense(h);
  EXPECT_TRUE(oracle.near_singular(m));
  h(1, 1) = -1.0;
  EXPECT_FALSE(oracle.near_singular(SymMatrix::from_dense(h)));
}
