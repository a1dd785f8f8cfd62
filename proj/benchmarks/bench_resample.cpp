#include "curtailkit/timeseries.hpp"
#include "curtailkit/synthetic.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace curtailkit;

Series year_of_five_minute() {
    return periodic_series(Timestamp{Seconds{1'640'995'200}}, 105'120, Resolution::five_minute(), 288, 40.0, 20.0,
                           Unit::UsdPerMwh);
}

void BM_ResampleHourlyMean(benchmark::State& state) {
    const Series s = year_of_five_minute();
    for (auto _ : state) {
        auto h = resample(s, Resolution::hourly(), AggregateMode::Mean);
        benchmark::DoNotOptimize(h.size());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.size()));
}
BENCHMARK(BM_ResampleHourlyMean)->Unit(benchmark::kMicrosecond);

void BM_TimeOfDayProfile(benchmark::State& state) {
    const Series s = year_of_five_minute();
    for (auto _ : state) {
        auto p = time_of_day_profile(s, Resolution::hourly(), "America/Chicago");
        benchmark::DoNotOptimize(p.bucket_count());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.size()));
}
BENCHMARK(BM_TimeOfDayProfile)->Unit(benchmark::kMillisecond);

} // namespace
