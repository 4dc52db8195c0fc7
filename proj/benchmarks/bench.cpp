#include <benchmark/benchmark.h>

#include "shapelab/rng.hpp"
#include "shapelab/simulator.hpp"

using namespace shapelab;

static void BM_CounterDraw(benchmark::State& state) {
    std::uint64_t key = 0x9e3779b97f4a7c15ull, ctr = 0, acc = 0;
    for (auto _ : state) acc ^= detail::counter_draw(key, ctr++);
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CounterDraw);

static void BM_JumpStream(benchmark::State& state) {
    PathStream s{particle_key(MasterSeed{7}, ParticleId{{0}, 0}), 0};
    double acc = 0;
    for (auto _ : state) {
        Jump j = next_jump(s, 1.0, 2);
        acc += j.wait;
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_JumpStream);

// Events per second of the full loop, the number that gates every
// acceptance-scale experiment.  Arg = dimension.
static void BM_EventLoop(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::uint64_t events = 0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        ProcessSpec spec;
        spec.d = d;
        spec.horizon = d == 1 ? 40.0 : 12.0;
        spec.seed = MasterSeed{seed++};
        auto res = run(spec);
        events += res.event_count;
    }
    state.counters["events/s"] = benchmark::Counter(
        static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EventLoop)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
