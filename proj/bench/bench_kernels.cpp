// Serial reference against OpenMP kernels on the same draw specifications.

#include <benchmark/benchmark.h>

#include <vector>

#include "gls/kernels.hpp"
#include "gls/moment_engine.hpp"

namespace {

using gls::Execution;
namespace k = gls::kernels;

const gls::SumModel& example_sum() {
    static const gls::SumModel sum(gls::RandomVariableModel::example_a(), 16);
    return sum;
}

void BM_Fill(benchmark::State& state, Execution exec) {
    const auto sampler = k::make_sampler(example_sum().base);
    const auto spec = k::draw_spec(example_sum(), sampler, 7, 0);
    std::vector<double> out(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        k::fill(spec, out, exec);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PowerSums(benchmark::State& state, Execution exec) {
    const auto sampler = k::make_sampler(example_sum().base);
    const auto spec = k::draw_spec(example_sum(), sampler, 7, 0);
    const auto grid = gls::geometric_grid(2.0, 16.0, 32);
    for (auto _ : state) {
        auto sums = k::abs_power_sums(spec, state.range(0), grid, exec);
        benchmark::DoNotOptimize(sums.sum_p.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Exceedances(benchmark::State& state, Execution exec) {
    const auto sampler = k::make_sampler(example_sum().base);
    const auto spec = k::draw_spec(example_sum(), sampler, 7, 0);
    const auto u = gls::linear_grid(1.0, 2.5, 0.25);
    for (auto _ : state) {
        auto hits = k::count_exceedances(spec, state.range(0), u, false, exec);
        benchmark::DoNotOptimize(hits.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Fill, serial, Execution::serial)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_Fill, parallel, Execution::parallel)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_PowerSums, serial, Execution::serial)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_PowerSums, parallel, Execution::parallel)->Arg(1 << 18);
BENCHMARK_CAPTURE(BM_Exceedances, serial, Execution::serial)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_Exceedances, parallel, Execution::parallel)->Arg(1 << 20);

BENCHMARK_MAIN();
