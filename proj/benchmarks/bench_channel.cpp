// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "bdris/capacity.hpp"
#include "bdris/channel.hpp"
#include "bdris/rng.hpp"
#include "bdris/scenario.hpp"

namespace {

using namespace bdris;

void BM_BuildChannel(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    ScenarioConfig scen;
    scen.master_seed = 11;
    const Realization real = generate(scen, 0);
    const ClockAndLength cl = choose_clock_and_length(real.paths, 30e6, 1e-6, s - 1);
    SystemParams params;
    params.carrier_freq_hz = scen.carrier_freq_hz;
    params.bandwidth_hz = 30e6;
    params.num_subcarriers = s;
    params.num_taps = cl.num_taps;
    params.clock_delay_s = cl.clock_delay_s;
    params.noise_power_w = 1e-15;
    params.grid = ElementGrid{8, 8, scen.element_spacing_m()};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_channel(real.paths, params));
    }
}
BENCHMARK(BM_BuildChannel)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Waterfill(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    Rng rng(5);
    Eigen::VectorXd gains(s);
    for (int nu = 0; nu < s; ++nu) gains(nu) = rng.uniform() * 1e-12;
    for (auto _ : state) {
        benchmark::DoNotOptimize(waterfill(gains, 0.15, 1e-13));
    }
}
BENCHMARK(BM_Waterfill)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace
