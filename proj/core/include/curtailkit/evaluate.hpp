#pragma once

#include "curtailkit/forecast.hpp"
#include "curtailkit/timeseries.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace curtailkit {

enum class SelectionDirection {
    /// Pick the steps with the highest forecast (curtailment-valued forecasts).
    SelectMaxValue,
    /// Pick the steps with the lowest forecast (price-like forecasts).
    SelectMinValue,
};

std::string_view to_string(SelectionDirection direction) noexcept;

/// A flexible load needing `c` of energy use inside `[t, t + w)`.
struct LoadShiftSpec {
    Timestamp t;
    Seconds w;
    Seconds c;
    /// Inferred from the forecast unit when absent: min for USD/MWh, max otherwise.
    std::optional<SelectionDirection> direction;
    /// Restrict selection to one uninterrupted block of `c`.
    bool contiguous = false;
};

/// Window scores in units of the actual series (MW, or the flag fraction for
/// boolean01 actuals); the actual is curtailment, so higher is better.
struct ImpactReport {
    double forecast_impact = 0.0;
    double immediate_baseline = 0.0;
    double random_baseline = 0.0;
    double oracle_impact = 0.0;
    double anti_oracle_impact = 0.0;
    /// Window-relative step indices chosen from the forecast, ascending.
    std::vector<std::size_t> selected_steps;
    SelectionDirection direction = SelectionDirection::SelectMaxValue;
    /// Forecast gaps left out of the selection.
    std::size_t excluded_forecast_gaps = 0;
    Unit actual_unit = Unit::Mw;
};

/// Mean of `values`, summed in descending order so equal multisets give
/// bit-identical means regardless of position.
double subset_mean(std::vector<double> values);

/// Indices of `k` extremal values (ties to the earlier index), ascending.
/// Entries that are nullopt are never picked.
std::vector<std::size_t> select_extremal(std::span<const std::optional<double>> scores, std::size_t k,
                                         SelectionDirection direction);

/// Start index of the best block of `k` consecutive present scores, ties to
/// the earlier block; nullopt when no such block exists.
std::optional<std::size_t> select_contiguous(std::span<const std::optional<double>> scores, std::size_t k,
                                             SelectionDirection direction);

ImpactReport load_shift_impact(const ForecastSeries& forecast, const Series& actual, const LoadShiftSpec& spec);
ImpactReport load_shift_impact(const Series& forecast, const Series& actual, const LoadShiftSpec& spec);

struct RegressionMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t count = 0;
};

struct ClassificationMetrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    /// Absent where the defining ratio is 0/0.
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> accuracy;
};

/// Over the grid intersection, ignoring pairs where either side is a gap.
RegressionMetrics regression_metrics(const Series& forecast, const Series& actual);
ClassificationMetrics classification_metrics(const Series& forecast_signal, const Series& actual_signal);

struct ImpactTotals {
    std::size_t windows = 0;
    double forecast_impact = 0.0;
    double immediate_baseline = 0.0;
    double random_baseline = 0.0;
    double oracle_impact = 0.0;
    double anti_oracle_impact = 0.0;

    void add(const ImpactReport& report) noexcept;
    void merge(const ImpactTotals& other) noexcept;
};

struct ImpactMeans {
    double forecast_impact;
    double immediate_baseline;
    double random_baseline;
    double oracle_impact;
    double anti_oracle_impact;
    /// forecast / random and forecast / immediate; absent for a zero baseline.
    std::optional<double> uplift_vs_random;
    std::optional<double> uplift_vs_immediate;
};

ImpactMeans means_of(const ImpactTotals& totals);

struct WindowResult {
    LoadShiftSpec spec;
    ImpactReport report;
};

struct SweepReport {
    std::vector<WindowResult> windows;
    ImpactTotals totals;
    /// Specs with no forecast covering their window.
    std::size_t uncovered = 0;

    ImpactMeans overall() const { return means_of(totals); }
    /// Associative combination of independent sweeps.
    void merge(SweepReport other);
};

/// Scores each spec with the most recently issued forecast covering its
/// window. Throws Error(EmptyInput) for no specs or no backtest entries.
SweepReport sweep(std::span<const BacktestEntry> results, std::span<const LoadShiftSpec> specs);

/// `window_start,w,c,forecast_impact,immediate,random,oracle,anti_oracle`,
/// durations in seconds.
void write_report_csv(std::ostream& out, const SweepReport& report);

/// JSON summary: the overall means, uplift ratios and window counts.
std::string summary_json(const SweepReport& report);

} // namespace curtailkit
