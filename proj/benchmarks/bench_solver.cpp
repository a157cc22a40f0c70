// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "bdris/baselines.hpp"
#include "bdris/channel.hpp"
#include "bdris/scenario.hpp"
#include "bdris/solver.hpp"

namespace {

using namespace bdris;

SubcarrierChannel reference_channel(int rows, int cols, int num_subcarriers) {
    ScenarioConfig scen;
    scen.grid = ElementGrid{rows, cols, 0.0};
    scen.master_seed = 7;
    const Realization real = generate(scen, 0);
    const ClockAndLength cl =
        choose_clock_and_length(real.paths, 30e6, 1e-6, num_subcarriers - 1);
    SystemParams params;
    params.carrier_freq_hz = scen.carrier_freq_hz;
    params.bandwidth_hz = 30e6;
    params.num_subcarriers = num_subcarriers;
    params.num_taps = cl.num_taps;
    params.clock_delay_s = cl.clock_delay_s;
    params.noise_power_w = 1e-15;
    params.grid = ElementGrid{rows, cols, scen.element_spacing_m()};
    return build_channel(real.paths, params);
}

void BM_Optimize(benchmark::State& state) {
    const int n_side = static_cast<int>(state.range(0));
    const int s = static_cast<int>(state.range(1));
    const SubcarrierChannel chan = reference_channel(n_side, n_side, s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize(chan, 100));
    }
}
BENCHMARK(BM_Optimize)
    ->Args({4, 200})
    ->Args({8, 200})
    ->Args({8, 2000})
    ->Unit(benchmark::kMillisecond);

void BM_Takagi(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(3);
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = rng.complex_normal();
    m = (0.5 * (m + m.transpose().eval())).eval();
    for (auto _ : state) {
        benchmark::DoNotOptimize(takagi(m));
    }
}
BENCHMARK(BM_Takagi)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_DiagonalPowerIteration(benchmark::State& state) {
    const SubcarrierChannel chan = reference_channel(8, 8, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(diagonal_power_iteration(chan, 100));
    }
}
BENCHMARK(BM_DiagonalPowerIteration)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
