#include <benchmark/benchmark.h>

#include <random>

#include "minmax/chauffeur.hpp"
#include "minmax/ldlt.hpp"
#include "minmax/newton.hpp"
#include "minmax/test_functions.hpp"

using namespace minmax;

namespace {

SymMatrix random_dense(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return SymMatrix::from_dense(a + a.transpose());
}

void BM_DenseLdlt(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const SymMatrix a = random_dense(n, 7);
  const auto pol = GammaPolicy::uniform(n, 1, 1e-8);
  for (auto _ : st) benchmark::DoNotOptimize(inertia(ldlt_factor(a, pol)));
}
BENCHMARK(BM_DenseLdlt)->Arg(16)->Arg(64)->Arg(256);

// KKT matrix of the simultaneous horizon problem at the cold start.
void BM_SparseKktLdlt(benchmark::State& st) {
  ChauffeurParams prm;
  prm.T = static_cast<int>(st.range(0));
  const auto p = build_horizon_problem(prm, prm.x_p0, prm.x_e0, Formulation::Simultaneous);
  const auto [x, y] =
      horizon_primal(prm, prm.x_p0, prm.x_e0, Vec::Zero(prm.T), Vec::Zero(2 * prm.T),
                     Formulation::Simultaneous);
  const KktSystem k = assemble_scaled_kkt(p, initial_point(p, x, y), 1.0, Modification{});
  const auto pol = GammaPolicy::uniform(k.jzz.size(), 1, 1e-8);
  FactorOptions fo;
  fo.symbolic = symbolic_analyze(k.jzz.lower());
  for (auto _ : st) benchmark::DoNotOptimize(inertia(ldlt_factor(k.jzz, pol, fo)));
  st.counters["n"] = static_cast<double>(k.jzz.size());
}
BENCHMARK(BM_SparseKktLdlt)->Arg(10)->Arg(40)->Arg(160);

void BM_NewtonF2(benchmark::State& st) {
  const auto p = builtin_problem("f2");
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        newton_solve(p, Vec::Constant(1, 1.3), Vec::Constant(1, -0.7)).status);
  }
}
BENCHMARK(BM_NewtonF2);

void BM_HorizonSolve(benchmark::State& st) {
  ChauffeurParams prm;
  prm.T = static_cast<int>(st.range(0));
  const auto p = build_horizon_problem(prm, prm.x_p0, prm.x_e0, Formulation::Simultaneous);
  const auto [x, y] =
      horizon_primal(prm, prm.x_p0, prm.x_e0, Vec::Zero(prm.T), Vec::Zero(2 * prm.T),
                     Formulation::Simultaneous);
  const auto z0 = initial_point(p, x, y);
  const auto opts = default_mpc_options().ip;
  for (auto _ : st) benchmark::DoNotOptimize(ip_solve(p, z0, opts).iters);
}
BENCHMARK(BM_HorizonSolve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
