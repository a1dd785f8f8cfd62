#include "curtailkit/detect.hpp"
#include "curtailkit/synthetic.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace curtailkit;

void BM_DetectNodes(benchmark::State& state) {
    NodalSpec spec;
    spec.nodes = 50;
    spec.steps = 20160;
    const auto data = nodal_dataset(spec);
    const auto threads = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto s = detect_nodes(data.lmp, 1.62, threads);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * spec.nodes * spec.steps));
}
BENCHMARK(BM_DetectNodes)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CalibrateAndThreshold(benchmark::State& state) {
    LogisticSpec spec;
    spec.steps = static_cast<std::size_t>(state.range(0));
    const auto data = logistic_dataset(spec);
    const auto edges = default_bin_edges();
    for (auto _ : state) {
        const auto curve = calibration_curve(data.min_lmp, data.curtailment, 1.0, edges);
        auto r = extract_threshold(curve, 0.5);
        benchmark::DoNotOptimize(r.threshold_price);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * spec.steps));
}
BENCHMARK(BM_CalibrateAndThreshold)->Arg(50'000)->Arg(500'000)->Unit(benchmark::kMillisecond);

void BM_MinLmp(benchmark::State& state) {
    NodalSpec spec;
    spec.nodes = 50;
    spec.steps = 20160;
    const auto data = nodal_dataset(spec);
    for (auto _ : state) {
        auto m = min_lmp_series(data.lmp);
        benchmark::DoNotOptimize(m.size());
    }
}
BENCHMARK(BM_MinLmp)->Unit(benchmark::kMillisecond);

} // namespace
