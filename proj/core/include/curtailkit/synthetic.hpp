#pragma once

#include "curtailkit/ingest.hpp"
#include "curtailkit/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace curtailkit {

/// Min-LMP drawn uniformly on [price_lo, price_hi]; a curtailment event occurs
/// with probability 1 / (1 + exp((x - x0) / scale)).
struct LogisticSpec {
    std::size_t steps = 50000;
    double x0 = 2.0;
    double scale = 1.0;
    double price_lo = -50.0;
    double price_hi = 50.0;
    /// MW reported for an event step; non-event steps report 0.
    double event_mw = 100.0;
    Timestamp start{};
    Resolution resolution = Resolution::five_minute();
    std::string zone = "UTC";
    std::uint64_t seed = 1;
};

struct LogisticDataset {
    Series min_lmp;
    Series curtailment;
};

LogisticDataset logistic_dataset(const LogisticSpec& spec);

/// Several nodes sharing a regional price path plus per-node noise, with
/// curtailment driven by the nodal minimum as in LogisticSpec.
struct NodalSpec {
    std::size_t nodes = 4;
    std::size_t steps = 2016;
    double x0 = 2.0;
    double scale = 1.0;
    double node_spread = 3.0;
    double event_mw = 100.0;
    /// Probability that any single LMP value is missing.
    double gap_rate = 0.0;
    Timestamp start{};
    Resolution resolution = Resolution::five_minute();
    std::string zone = "UTC";
    std::string region = "system";
    std::uint64_t seed = 1;
};

struct NodalDataset {
    SeriesSet lmp;
    Series curtailment;
    std::vector<LmpRecord> lmp_records;
    std::vector<CurtailmentRecord> curtailment_records;
};

/// Node ids are `N001`, `N002`, ...
NodalDataset nodal_dataset(const NodalSpec& spec);

/// `offset + amplitude * sin(2 pi (i mod period) / period)`; exactly periodic.
Series periodic_series(Timestamp start, std::size_t steps, Resolution resolution, std::size_t period_steps,
                       double amplitude, double offset, Unit unit = Unit::Mw);

/// Streams `nodes * steps` canonical LMP rows without materialising them.
void write_synthetic_lmp_csv(std::ostream& out, std::size_t nodes, std::size_t steps, Timestamp start,
                             Resolution resolution, std::uint64_t seed);

} // namespace curtailkit
