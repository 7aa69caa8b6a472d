#include <benchmark/benchmark.h>

#include "inflam/analysis.hpp"
#include "inflam/presets.hpp"
#include "inflam/requirements.hpp"
#include "inflam/solver.hpp"

using namespace inflam;

namespace {

void BM_RhsEvaluation(benchmark::State& state) {
  const Grid g = Grid::unit_square(static_cast<int>(state.range(1)));
  const auto model = preset(static_cast<int>(state.range(0)), Course::Chronic);
  const auto rhs = assemble_rhs(model, g);
  const auto y = initial_state(model, g).pack();
  std::vector<double> f(y.size());
  for (auto _ : state) {
    rhs(0.0, y, f);
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(y.size()));
}
BENCHMARK(BM_RhsEvaluation)->ArgsProduct({{1, 2, 3}, {21, 41}});

void BM_Integrate(benchmark::State& state) {
  const Grid g = Grid::unit_square(21);
  const auto model = preset(static_cast<int>(state.range(0)), Course::Chronic);
  const auto rhs = assemble_rhs(model, g);
  const auto s0 = initial_state(model, g);
  SolverConfig cfg;
  cfg.t_end = 5.0;
  for (auto _ : state) {
    auto traj = integrate(rhs, s0, cfg);
    benchmark::DoNotOptimize(traj.final_state.t);
  }
}
BENCHMARK(BM_Integrate)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_RequirementCheck(benchmark::State& state) {
  const auto model = preset(1, Course::Healing);
  for (auto _ : state) benchmark::DoNotOptimize(check_requirements(model, {1024, 1}).rules.size());
}
BENCHMARK(BM_RequirementCheck)->Unit(benchmark::kMillisecond);

void BM_SigmaCriterion(benchmark::State& state) {
  const auto model = preset(3, Course::Chronic);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_criterion(model, 4096).sigma);
}
BENCHMARK(BM_SigmaCriterion)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
