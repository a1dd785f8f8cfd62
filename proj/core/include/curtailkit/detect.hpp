#pragma once

#include "curtailkit/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curtailkit {

/// Per-step minimum over nodes with a present value; a gap only where every
/// node is a gap. Inputs must share one grid and be USD/MWh.
Series min_lmp_series(const SeriesSet& nodal);
Series min_lmp_series(std::span<const Series> nodal);

enum class CalibrationMode {
    /// Frequency among steps whose min-LMP falls inside the bin.
    Binned,
    /// Frequency among steps whose min-LMP lies below the bin's upper edge.
    Cumulative,
};

struct CalibrationOptions {
    std::size_t min_count = 30;
    CalibrationMode mode = CalibrationMode::Binned;
};

struct CalibrationBin {
    double lo;
    double hi;
    std::size_t sample_count = 0;
    std::size_t curtailed_count = 0;
    /// Present only when `sample_count >= min_count`.
    std::optional<double> frequency;
};

/// Empirical likelihood of curtailing at least `amount_level` given the
/// minimum LMP, on contiguous bins `[edge_i, edge_i+1)`.
struct CalibrationCurve {
    double amount_level;
    std::vector<double> bin_edges;
    std::vector<CalibrationBin> bins;
    std::size_t min_count;
    CalibrationMode mode;

    std::size_t calibrated_bin_count() const noexcept;
};

/// `[-50, 50]` in $1 steps.
std::vector<double> default_bin_edges();

/// `count + 1` edges from `lo` to `hi`.
std::vector<double> uniform_bin_edges(double lo, double hi, double width);

/// Steps where either series is a gap, or min-LMP falls outside the edges, are
/// ignored. MW curtailment counts when `value >= amount_level`; boolean01
/// curtailment counts when the flag is set.
CalibrationCurve calibration_curve(const Series& min_lmp, const Series& curtailment, double amount_level,
                                   std::span<const double> bin_edges, CalibrationOptions options = {});

struct FittedPoint {
    double price;     ///< bin midpoint
    double frequency; ///< isotonic fit, non-increasing in price
    std::size_t weight;
};

/// Weighted pool-adjacent-violators fit constrained to be non-increasing.
std::vector<double> isotonic_decreasing(std::span<const double> values, std::span<const double> weights);

enum class ThresholdMethod { IsotonicInterpolated };

struct ThresholdResult {
    double target_likelihood;
    double threshold_price;
    ThresholdMethod method = ThresholdMethod::IsotonicInterpolated;
    /// Target never crossed; the price is the nearer end of the fitted range.
    bool saturated = false;
    double amount_level = 0.0;
    std::vector<FittedPoint> fitted;
};

/// Fits the calibrated bins isotonically (weighted by sample count) and
/// interpolates the price at which the fitted likelihood falls to `target`.
ThresholdResult extract_threshold(const CalibrationCurve& curve, double target);

/// Fitted likelihood aligned with `curve.bins`; nullopt for uncalibrated bins.
std::vector<std::optional<double>> fitted_frequencies(const CalibrationCurve& curve, const ThresholdResult& result);

struct DetectionSignal {
    std::string node_id;
    Series series;
    std::optional<double> threshold_price;
    std::vector<double> bin_edges;
};

/// 1 where price <= threshold, 0 above; gaps propagate.
DetectionSignal detect(const Series& node_series, double threshold, std::string node_id = {});

/// Per-node detection over disjoint work ranges on up to `threads` threads.
std::vector<DetectionSignal> detect_nodes(const SeriesSet& nodal, double threshold, std::size_t threads = 1);

/// Left-closed bins: index = number of edges <= value, so edges `[e0..ek]`
/// give k + 2 bins `(-inf, e0), [e0, e1), ..., [ek, +inf)`.
DetectionSignal bin_signal(const Series& series, std::span<const double> edges, std::string node_id = {});

struct HeatmapCell {
    std::size_t count = 0;
    std::size_t below = 0;
    std::optional<double> fraction;
};

struct NodeHeatmapRow {
    std::string node_id;
    std::vector<HeatmapCell> buckets;
    /// All-buckets share of steps at or below the threshold.
    HeatmapCell total;
};

struct NodeHeatmapStats {
    double threshold;
    Resolution bucket_width;
    std::string zone;
    std::vector<NodeHeatmapRow> nodes;
};

/// Per node and local time-of-day bucket, the share of present steps with
/// price <= threshold.
NodeHeatmapStats below_threshold_heatmap(const SeriesSet& nodal, double threshold, Resolution bucket,
                                         std::string_view zone);

} // namespace curtailkit
