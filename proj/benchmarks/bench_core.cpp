#include "eslab/experiments.hpp"
#include "eslab/optimizer.hpp"
#include "eslab/scenario.hpp"
#include "eslab/simplex.hpp"

#include <benchmark/benchmark.h>

using namespace eslab;

namespace {

ReturnSample gauss_sample(std::size_t n, std::size_t t, std::uint64_t seed = 1) {
    return generate(GeneratorSpec::gaussian(1.0, seed), n, t);
}

void BM_EsProgram(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto t = static_cast<std::size_t>(state.range(1));
    const LinearProgram lp = build_es_lp(gauss_sample(n, t), 0.9, static_cast<double>(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(lp));
    }
}
BENCHMARK(BM_EsProgram)->Args({10, 100})->Args({20, 200})->Args({50, 500})->Unit(benchmark::kMillisecond);

void BM_MinimaxProgram(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const LinearProgram lp = build_maximal_loss_lp(gauss_sample(n, 4 * n), static_cast<double>(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(lp));
    }
}
BENCHMARK(BM_MinimaxProgram)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Parametric(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ReturnSample s = gauss_sample(n, 2 * n);
    const RiskSpec spec(Measure::ParametricES, 0.99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_parametric(s, spec, static_cast<double>(n)));
    }
}
BENCHMARK(BM_Parametric)->Arg(20)->Arg(100);

void BM_Generate(benchmark::State& state) {
    const GeneratorSpec specs[] = {GeneratorSpec::gaussian(), GeneratorSpec::student_t(4.0),
                                   GeneratorSpec::garch(0.05, 0.1, 0.85)};
    const GeneratorSpec& g = specs[state.range(0)];
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(g, 100, 1000));
    }
    state.SetItemsProcessed(state.iterations() * 100 * 1000);
    state.SetLabel(to_string(g));
}
BENCHMARK(BM_Generate)->DenseRange(0, 2);

void BM_InfeasibilityProbability(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(infeasibility_probability(RiskSpec::maximal_loss(), GeneratorSpec::gaussian(), 50,
                                                           100, 50, ExperimentOptions{1, 1}));
    }
}
BENCHMARK(BM_InfeasibilityProbability)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
