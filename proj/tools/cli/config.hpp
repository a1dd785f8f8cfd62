#pragma once

#include "curtailkit/detect.hpp"
#include "curtailkit/evaluate.hpp"
#include "curtailkit/forecast.hpp"
#include "curtailkit/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curtailkit::cli {

struct ThresholdConfig {
    double target = 0.5;
    double bin_lo = -50.0;
    double bin_hi = 50.0;
    double bin_width = 1.0;
    /// Steps with at least this much curtailed MW count as curtailed.
    double amount_mw = 1.0;
    std::size_t min_count = 30;
    CalibrationMode mode = CalibrationMode::Binned;
    bool per_node = false;
    /// Fixed detection threshold; calibrated from the data when absent.
    std::optional<double> price;
    /// Percent-of-nodes above which a PJM interval counts as curtailed.
    double percent_threshold = 0.0;
};

struct ForecastConfig {
    std::string model = "persistence";
    Horizon horizon;
    Seconds issue_every{86400};
    Resolution bucket = Resolution::hourly();
    /// `curtailment` or `min_lmp`.
    std::string target = "curtailment";
    /// Converts forecasts to 0/1 signals for classification metrics.
    std::optional<double> signal_threshold;
    std::size_t threads = 1;
};

struct LoadShiftConfig {
    Seconds w{8 * 3600};
    Seconds c{2 * 3600};
    /// Spacing of window starts inside each forecast; defaults to `w`.
    std::optional<Seconds> every;
    std::optional<SelectionDirection> direction;
    bool contiguous = false;
};

/// Keys of the JSON config file (all optional):
///
///     {
///       "catalog": "data",             // catalog root or catalog.json
///       "iso": "CAISO",
///       "from": "2022-01-01T00:00:00Z", "to": "2023-01-01T00:00:00Z",
///       "resolution": "1h",            // resample target for forecasting
///       "out": "results",
///       "seed": 7,
///       "threshold": {"target": 0.5, "bin_lo": -50, "bin_hi": 50,
///                     "bin_width": 1, "amount_mw": 1, "min_count": 30,
///                     "mode": "binned" | "cumulative", "per_node": false,
///                     "price": 1.62, "percent_threshold": 0},
///       "forecast": {"model": "persistence" | "day_ahead" | "climatology" | "oracle",
///                    "preset": "day_ahead", "lead": "0s", "horizon": "24h",
///                    "issue_every": "24h", "bucket": "1h",
///                    "target": "curtailment" | "min_lmp",
///                    "signal_threshold": 0.5, "threads": 1},
///       "load_shift": [{"w": "8h", "c": "2h", "every": "8h",
///                       "direction": "max" | "min", "contiguous": false}]
///     }
///
/// Durations are integer seconds or a number followed by s, m, h, d or w.
struct RunConfig {
    std::optional<std::filesystem::path> catalog;
    std::optional<IsoId> iso;
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;
    std::optional<Resolution> resolution;
    std::optional<std::filesystem::path> out;
    std::uint64_t seed = 1;
    ThresholdConfig threshold;
    ForecastConfig forecast;
    std::vector<LoadShiftConfig> load_shift;
};

/// Throws Error(ConfigError) on malformed text or values.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

Seconds parse_duration(std::string_view text);
Timestamp parse_timestamp(std::string_view text);
IsoId parse_iso(std::string_view text);

} // namespace curtailkit::cli
