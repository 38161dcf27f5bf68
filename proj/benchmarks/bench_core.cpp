#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "eqalloc/config.hpp"
#include "eqalloc/feasible_set.hpp"
#include "eqalloc/objectives.hpp"
#include "eqalloc/policies.hpp"
#include "eqalloc/scenarios.hpp"

using namespace eqalloc;

namespace {

ScenarioConfig malawi() {
  return load_scenario(std::filesystem::path(EQALLOC_SOURCE_DIR) / "configs/malawi.json");
}

std::vector<Matrix> maps_of(const ScenarioConfig& config) {
  std::vector<Matrix> maps;
  for (const auto& m : config.models) maps.push_back(static_maps(m).G);
  return maps;
}

void BM_Project(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  BudgetSet set;
  set.kind = BudgetKind::Exact;
  set.s_max = Vector::Constant(2, static_cast<double>(n));
  const Profile u = Profile::NullaryExpr(n, 2, [&] { return 2.0 * normal(rng); });
  for (auto _ : state) benchmark::DoNotOptimize(project(set, u));
}
BENCHMARK(BM_Project)->Arg(9)->Arg(25)->Arg(250)->Arg(2500);

void BM_CostGradient(benchmark::State& state) {
  const auto config = malawi();
  const auto maps = maps_of(config);
  const Profile u = config.initial_funding;
  for (auto _ : state) benchmark::DoNotOptimize(cost_gradient(config.cost, config.graph, u, maps));
}
BENCHMARK(BM_CostGradient);

void BM_SolSolve(benchmark::State& state) {
  const auto config = malawi();
  const auto maps = maps_of(config);
  const auto set = config.budget_at(config.horizon);
  PolicyConfig sol;
  sol.l_max = static_cast<std::size_t>(state.range(0));
  sol.stop_tol = 0.0;
  const Profile start = default_start(set, config.communities());
  for (auto _ : state) benchmark::DoNotOptimize(sol_solve(config.graph, maps, config.cost, set, sol, start));
}
BENCHMARK(BM_SolSolve)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RunScenario(benchmark::State& state) {
  auto config = malawi();
  config.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(config));
}
BENCHMARK(BM_RunScenario)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
