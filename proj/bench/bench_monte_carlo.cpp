/*
 Copyright 2026 The asymgame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// Serial reference vs OpenMP Monte Carlo on the baseline pursuit-evasion solution.
// Both produce bit-identical statistics; the benchmark reports rollout steps per second.
#include "asymgame/config.hpp"
#include "asymgame/simulator.hpp"
#include "asymgame/stationary_solver.hpp"

#include <benchmark/benchmark.h>

using namespace asymgame;

namespace {

struct Fixture {
    ValidatedStationary model = std::get<ValidatedStationary>(load_model(scenario("pe-baseline")));
    StationarySolution sol = value_iterate(model);
    ClosedLoop loop = ClosedLoop::stationary(model, sol);
    InitSpec init = InitSpec::stationary(sol.state_covariance);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

constexpr std::size_t kSteps = 500;

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto& f = fixture();
    const auto N = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_serial(f.loop, f.init, N, kSteps, 1).average_stage_cost);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * N * kSteps));
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto& f = fixture();
    const auto N = static_cast<std::size_t>(state.range(0));
    MonteCarloOptions opts;
    opts.threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo(f.loop, f.init, N, kSteps, 1, opts).average_stage_cost);
    }
    state.counters["threads"] = rollout_threads(opts.threads);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * N * kSteps));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)
    ->ArgsProduct({{256, 1024}, {0, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
