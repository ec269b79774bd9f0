#include <benchmark/benchmark.h>

#include "idm/inference.hpp"
#include "idm/simulation.hpp"

namespace {

const std::vector<double> kTimes{30, 40, 50, 60, 70, 80, 90, 100};
const std::vector<idm::Method> kMethods{idm::Method::Check, idm::Method::MM, idm::Method::AalenJohansen};

idm::ScenarioConfig scenario(benchmark::State& state) {
  auto cfg = idm::ScenarioConfig::table1();
  cfg.replications = static_cast<int>(state.range(0));
  return cfg;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const auto cfg = scenario(state);
  for (auto _ : state) benchmark::DoNotOptimize(idm::run_monte_carlo_serial(cfg, kMethods, kTimes, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const auto cfg = scenario(state);
  for (auto _ : state) benchmark::DoNotOptimize(idm::run_monte_carlo(cfg, kMethods, kTimes, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto cohort = idm::simulate_cohort(idm::ScenarioConfig::table1(), 0);
  const auto q = idm::TransitionQuery::make(10, 50);
  const int n_boot = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(idm::bootstrap_ci_serial(cohort, q, idm::Method::Check, n_boot, 0.95, 1));
  }
  state.SetItemsProcessed(state.iterations() * n_boot);
}

void BM_BootstrapParallel(benchmark::State& state) {
  const auto cohort = idm::simulate_cohort(idm::ScenarioConfig::table1(), 0);
  const auto q = idm::TransitionQuery::make(10, 50);
  const int n_boot = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(idm::bootstrap_ci(cohort, q, idm::Method::Check, n_boot, 0.95, 1));
  }
  state.SetItemsProcessed(state.iterations() * n_boot);
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapSerial)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
