#include <benchmark/benchmark.h>

#include "padwerk/classifier.hpp"
#include "padwerk/random.hpp"

using namespace padwerk;

namespace {

DirectionSequence random_sequence(Rng& rng, std::size_t length) {
    DirectionSequence s;
    s.values.resize(length);
    for (auto& v : s.values) v = rng.below(2) ? 1 : -1;
    return s;
}

void BM_Featurize(benchmark::State& state) {
    Rng rng{1};
    const DirectionSequence s = random_sequence(rng, kDefaultSequenceLength);
    for (auto _ : state) benchmark::DoNotOptimize(featurize(s));
}
BENCHMARK(BM_Featurize);

void BM_KnnScores(benchmark::State& state) {
    Rng rng{2};
    const auto n = static_cast<std::size_t>(state.range(0));
    LabeledFeatures train, test;
    for (std::size_t i = 0; i < n; ++i) {
        train.labels.push_back(Label::monitored(static_cast<int>(i % 50), 0, 0));
        train.features.push_back(featurize(random_sequence(rng, 500)));
    }
    for (std::size_t i = 0; i < 100; ++i) {
        test.labels.push_back(Label::monitored(static_cast<int>(i % 50), 9, 0));
        test.features.push_back(featurize(random_sequence(rng, 500)));
    }
    for (auto _ : state) benchmark::DoNotOptimize(knn_scores(train, test));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_KnnScores)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
