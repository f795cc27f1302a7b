#include <benchmark/benchmark.h>

#include "padwerk/distribution.hpp"
#include "padwerk/random.hpp"

using namespace padwerk;

namespace {

void BM_SampleDelay(benchmark::State& state) {
    DistSpec d;
    d.family = static_cast<DistFamily>(state.range(0));
    d.param1 = 4000;
    d.param2 = 2;
    if (d.family == DistFamily::uniform) d.param2 = 8000;
    if (d.family == DistFamily::geometric) d.param1 = 0.01;
    if (d.family == DistFamily::weibull) d.param1 = 1.5;
    Rng rng{3};
    for (auto _ : state) benchmark::DoNotOptimize(sample_distribution(d, SamplePurpose::delay, rng));
    state.SetLabel(std::string(to_string(d.family)));
}
BENCHMARK(BM_SampleDelay)->DenseRange(1, 6);

}  // namespace
