#include <benchmark/benchmark.h>

#include <map>

#include "conesta/objective.hpp"
#include "conesta/simulation.hpp"
#include "conesta/smoothing.hpp"
#include "conesta/solvers.hpp"
#include "conesta/structure_operator.hpp"

namespace {

using namespace conesta;

const LabeledDataset& dataset(std::size_t p) {
  static std::map<std::size_t, LabeledDataset> cache;
  auto it = cache.find(p);
  if (it == cache.end()) {
    SimulationDesign d;
    d.n = p;
    d.p = p;
    it = cache.emplace(p, simulate(d)).first;
  }
  return it->second;
}

void BM_TvApplyGrid(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const StructureOperator op = build_tv_operator(GridMask::full({side, side, side}));
  const Eigen::VectorXd beta = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(op.n_cols()), -1, 1);
  Eigen::VectorXd out(static_cast<Eigen::Index>(op.n_rows()));
  Eigen::VectorXd back(beta.size());
  for (auto _ : state) {
    op.apply(beta, out);
    op.apply_transpose(out, back);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.entries().size()) * 2);
}
BENCHMARK(BM_TvApplyGrid)->Arg(10)->Arg(30)->Arg(60);

void BM_SpectralNormChain(benchmark::State& state) {
  for (auto _ : state) {
    // A fresh operator each time, since the norm is cached per instance.
    const StructureOperator op = build_tv_operator(GridMask::chain(static_cast<std::size_t>(state.range(0))));
    benchmark::DoNotOptimize(op.spectral_norm());
  }
}
BENCHMARK(BM_SpectralNormChain)->Arg(200)->Arg(500);

void BM_EvaluateGap(benchmark::State& state) {
  const LabeledDataset& ds = dataset(static_cast<std::size_t>(state.range(0)));
  const Problem pb = ds.problem();
  const Eigen::VectorXd beta = ds.beta_star * 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_gap(pb, beta, 1e-6).gap);
}
BENCHMARK(BM_EvaluateGap)->Arg(200)->Arg(500);

void BM_FistaIterations(benchmark::State& state) {
  const LabeledDataset& ds = dataset(static_cast<std::size_t>(state.range(0)));
  const Problem pb = ds.problem();
  pb.lipschitz_g();
  pb.op().spectral_norm();
  FistaBudget budget;
  budget.max_iterations = 1000;
  for (auto _ : state) {
    const SolverResult r = fista(pb, Eigen::VectorXd::Zero(pb.p()), 1e-300, 1e-4, budget);
    benchmark::DoNotOptimize(r.beta.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_FistaIterations)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  SimulationDesign d;
  d.n = d.p = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(d).f_star);
}
BENCHMARK(BM_Simulate)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
