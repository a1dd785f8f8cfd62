#include "curtailkit/evaluate.hpp"
#include "curtailkit/forecast.hpp"
#include "curtailkit/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace curtailkit;

void BM_LoadShiftImpact(benchmark::State& state) {
    const auto w = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 500);
    std::vector<std::optional<double>> a(w);
    std::vector<std::optional<double>> f(w);
    for (std::size_t i = 0; i < w; ++i) {
        a[i] = u(rng);
        f[i] = u(rng);
    }
    const TimeGrid g(Timestamp{Seconds{1'640'995'200}}, w, Resolution::five_minute());
    const Series actual(g, a, Unit::Mw);
    const Series forecast(g, f, Unit::Mw);
    const LoadShiftSpec spec{g.start(), Seconds{static_cast<std::int64_t>(w) * 300},
                             Seconds{static_cast<std::int64_t>(w / 4) * 300}, std::nullopt, state.range(1) != 0};
    for (auto _ : state) {
        auto r = load_shift_impact(forecast, actual, spec);
        benchmark::DoNotOptimize(r.forecast_impact);
    }
}
BENCHMARK(BM_LoadShiftImpact)->Args({96, 0})->Args({288, 0})->Args({288, 1})->Args({2016, 0});

void BM_BacktestSweep(benchmark::State& state) {
    const Series s = periodic_series(Timestamp{Seconds{1'640'995'200}}, 288 * 30, Resolution::five_minute(), 288,
                                     50.0, 50.0);
    const auto schedule = issue_schedule(s.grid().start() + Seconds{86400}, s.grid().end() - Seconds{86400},
                                         Seconds{86400});
    std::vector<LoadShiftSpec> specs;
    for (const auto t : schedule) {
        for (int h = 0; h < 24; h += 8) {
            specs.push_back({t + Seconds{h * 3600}, Seconds{8 * 3600}, Seconds{2 * 3600}, std::nullopt, false});
        }
    }
    for (auto _ : state) {
        const auto bt = backtest(DayAheadPersistenceForecaster{}, s, schedule, Horizon{});
        auto report = sweep(bt.entries, specs);
        benchmark::DoNotOptimize(report.totals.windows);
    }
}
BENCHMARK(BM_BacktestSweep)->Unit(benchmark::kMillisecond);

} // namespace
