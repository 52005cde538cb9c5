#include <benchmark/benchmark.h>

#include "avmerge/harness.hpp"

namespace {

using namespace avmerge;

Scenario platoon_scenario(int n) {
    ScenarioRanges ranges;
    ranges.n_min = ranges.n_max = n;
    ranges.alpha_min = ranges.alpha_max = 0.5;
    return random_scenario(42, ranges);
}

void BM_OptimalIndex(benchmark::State& state) {
    const Scenario sc = platoon_scenario(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        MergePlan plan = optimal_index(sc);
        benchmark::DoNotOptimize(plan.k);
    }
}
BENCHMARK(BM_OptimalIndex)->DenseRange(1, 6);

void BM_BruteForceOracle(benchmark::State& state) {
    const Scenario sc = platoon_scenario(4);
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        OracleResult oracle = brute_force(sc, grid, grid);
        benchmark::DoNotOptimize(oracle.argmin_k);
    }
}
BENCHMARK(BM_BruteForceOracle)->Arg(64)->Arg(128)->Arg(256);

void BM_EnergyClosedForm(benchmark::State& state) {
    double acc = 0.0;
    double t_m = 10.0;
    for (auto _ : state) {
        acc += energy_closed_form(0.0, 20.0, 0.0, 400.0, 25.0, t_m);
        t_m += 1e-9;  // defeat constant folding
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_EnergyClosedForm);

void BM_SafeWindows(benchmark::State& state) {
    const Scenario sc = platoon_scenario(6);
    for (auto _ : state) {
        for (int k = 1; k <= sc.sequence_count(); ++k) {
            auto window = safe_window(k, sc.t0, sc);
            benchmark::DoNotOptimize(window.has_value());
        }
    }
}
BENCHMARK(BM_SafeWindows);

}  // namespace

BENCHMARK_MAIN();
