#include "curtailkit/ingest.hpp"
#include "curtailkit/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <sstream>

namespace {

using namespace curtailkit;

void BM_ParseLmp(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    std::ostringstream out;
    write_synthetic_lmp_csv(out, 10, rows / 10, Timestamp{Seconds{1'600'000'000}}, Resolution::five_minute(), 1);
    const std::string text = out.str();
    const IsoDescriptor spp = descriptor_for(IsoId::SPP);
    for (auto _ : state) {
        std::istringstream in(text);
        auto r = parse_lmp(in, spp);
        benchmark::DoNotOptimize(r.records.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLmp)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_ToSeries(benchmark::State& state) {
    NodalSpec spec;
    spec.nodes = 20;
    spec.steps = static_cast<std::size_t>(state.range(0));
    const auto data = nodal_dataset(spec);
    const TimeGrid grid(spec.start, spec.steps, spec.resolution, spec.zone);
    for (auto _ : state) {
        auto set = to_series(data.lmp_records, grid);
        benchmark::DoNotOptimize(set.size());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.lmp_records.size()));
}
BENCHMARK(BM_ToSeries)->Arg(2016)->Arg(20160)->Unit(benchmark::kMillisecond);

} // namespace
