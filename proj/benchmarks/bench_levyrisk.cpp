#include <benchmark/benchmark.h>

#include <vector>

#include "levyrisk/allocation.hpp"
#include "levyrisk/cevar.hpp"
#include "levyrisk/evar.hpp"
#include "levyrisk/montecarlo.hpp"

namespace {

using namespace levyrisk;

FactorCombination mixed_combination() {
    return FactorCombination({BrownianWithDrift{.mu = 0.1, .sigma = 0.5}, GammaSubordinator{.a = 2.0, .b = 3.0},
                              AlphaStableSubordinator{.alpha = 0.6},
                              CompoundPoissonExp{.lambda = 0.5, .eta = 2.0, .mu = 0.05}},
                             {1.0, 0.7, 0.4, 1.3});
}

FactorPortfolio mixed_portfolio(std::size_t n) {
    std::vector<std::vector<double>> a;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 1.0 + 0.1 * static_cast<double>(i);
        a.push_back({x, 0.5 * x, 1.0 / x, 0.25});
    }
    return FactorPortfolio(std::move(a),
                           {BrownianWithDrift{.mu = 0.1, .sigma = 0.5}, GammaSubordinator{.a = 2.0, .b = 3.0},
                            AlphaStableSubordinator{.alpha = 0.6},
                            CompoundPoissonExp{.lambda = 0.5, .eta = 2.0, .mu = 0.05}},
                           std::vector<double>(n, 0.3), 1.0, 0.05);
}

void BM_EvarBrownian(benchmark::State& state) {
    const EvarQuery q{FactorCombination(BrownianWithDrift{.mu = 0.2, .sigma = 1.0}), 1.0, 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(evar(q));
}
BENCHMARK(BM_EvarBrownian);

void BM_EvarMixed(benchmark::State& state) {
    const EvarQuery q{mixed_combination(), 1.0, 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(evar(q));
}
BENCHMARK(BM_EvarMixed);

void BM_CevarMixed(benchmark::State& state) {
    const CevarQuery q{mixed_combination(), 2.0, 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(cevar(q));
}
BENCHMARK(BM_CevarMixed)->Unit(benchmark::kMillisecond);

void BM_Allocate(benchmark::State& state) {
    const FactorPortfolio p = mixed_portfolio(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(allocate(p));
}
BENCHMARK(BM_Allocate)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_EmpiricalEvar(benchmark::State& state) {
    SimulationConfig config;
    config.n_paths = static_cast<std::size_t>(state.range(0));
    const std::vector<double> x = simulate_terminal(mixed_combination(), 1.0, config);
    for (auto _ : state) benchmark::DoNotOptimize(empirical_evar(x, 0.05));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalEvar)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SimulateTerminal(benchmark::State& state) {
    SimulationConfig config;
    config.n_paths = 100000;
    const FactorCombination c = mixed_combination();
    for (auto _ : state) benchmark::DoNotOptimize(simulate_terminal(c, 1.0, config));
}
BENCHMARK(BM_SimulateTerminal)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
