#include <benchmark/benchmark.h>

#include "padwerk/catalog.hpp"
#include "padwerk/simulator.hpp"
#include "padwerk/synthetic.hpp"

using namespace padwerk;

namespace {

const Dataset& bench_dataset() {
    static const Dataset ds = [] {
        SyntheticOptions o;
        o.sites = 2;
        o.samples = 2;
        o.unmonitored = 0;
        return make_synthetic_dataset(o);
    }();
    return ds;
}

void BM_SimulateSpring(benchmark::State& state) {
    const MachinePair pair = build_spring();
    const Sample& s = bench_dataset().samples.front();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(pair, s.client, s.relay, ++seed));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.client.events.size()));
}
BENCHMARK(BM_SimulateSpring);

void BM_SimulateInterspaceDataset(benchmark::State& state) {
    const MachineSource source = MachineSource::interspace();
    for (auto _ : state) benchmark::DoNotOptimize(simulate_dataset(source, bench_dataset(), 1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bench_dataset().size()));
}
BENCHMARK(BM_SimulateInterspaceDataset)->Unit(benchmark::kMillisecond);

}  // namespace
