#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "pfcg/io.hpp"
#include "pfcg/laplace.hpp"
#include "pfcg/precond.hpp"
#include "pfcg/sparse.hpp"

using namespace pfcg;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

LaplaceOperator dipole_operator(int n) {
  auto g = std::make_shared<const Grid3D>(build_mesh({n, n, 2 * n}));
  auto bc = std::make_shared<const BoundarySpec>(
      BoundarySpec{UpperBoundary::SourceSurface, synth_map({MapKind::Dipole}, *g)});
  return LaplaceOperator::assemble(g, bc);
}

void set_items(benchmark::State& state, std::size_t n) {
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(n));
}

}  // namespace

static void BM_SpmvDia(benchmark::State& state) {
  const LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const auto x = random_vector(op.size(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spmv_dia(op.matrix(), x));
  set_items(state, op.size());
}
BENCHMARK(BM_SpmvDia)->Arg(16)->Arg(32);

static void BM_SpmvCsr(benchmark::State& state) {
  const LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const CsrMatrix a = dia_to_csr(op.matrix());
  const auto x = random_vector(op.size(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(spmv_csr(a, x));
  set_items(state, op.size());
}
BENCHMARK(BM_SpmvCsr)->Arg(16)->Arg(32);

static void BM_Ilu0(benchmark::State& state) {
  const LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const CsrMatrix a = dia_to_csr(op.matrix());
  for (auto _ : state) benchmark::DoNotOptimize(ilu0(a));
  set_items(state, op.size());
}
BENCHMARK(BM_Ilu0)->Arg(16)->Arg(32);

static void BM_LuSolve(benchmark::State& state) {
  const LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const LuCsr lu = ilu0(dia_to_csr(op.matrix()));
  const auto r = random_vector(op.size(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(lusolve(lu, r));
  set_items(state, op.size());
}
BENCHMARK(BM_LuSolve)->Arg(16)->Arg(32);

static void BM_OperatorApply(benchmark::State& state) {
  LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const auto x = random_vector(op.size(), 4);
  std::vector<double> y(op.size());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_items(state, op.size());
}
BENCHMARK(BM_OperatorApply)->Arg(16)->Arg(32);

static void BM_PcgIterations(benchmark::State& state) {
  LaplaceOperator op = dipole_operator(static_cast<int>(state.range(0)));
  const std::vector<double> b = op.build_rhs();
  const DiagPC pc1 = build_pc1(op);
  const IluPC pc2 = build_pc2(op);
  const LinearMap m = state.range(1) == 1 ? as_linear_map(pc1) : as_linear_map(pc2);
  SolveConfig cfg{1e-30};
  cfg.max_iter = 20;
  for (auto _ : state) {
    std::vector<double> x(op.size(), 0.0);
    benchmark::DoNotOptimize(pcg(op.as_linear_map(), m, b, x, cfg));
  }
  set_items(state, 20);
}
BENCHMARK(BM_PcgIterations)->Args({16, 1})->Args({16, 2})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
