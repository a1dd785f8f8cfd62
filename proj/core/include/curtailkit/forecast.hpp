#pragma once

#include "curtailkit/timeseries.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curtailkit {

/// Forecast coverage relative to the issue time: `[issued_at + lead,
/// issued_at + lead + length)`.
struct Horizon {
    Seconds lead{0};
    Seconds length{86400};

    bool operator==(const Horizon&) const = default;
};

/// Throws Error(InvalidArgument) unless lead >= 0 and length > 0 are whole
/// multiples of `resolution`.
void validate(const Horizon& horizon, Resolution resolution);

/// Named device windows: `thermostat` (1 h), `ev` (8 h), `battery` and
/// `day_ahead` (24 h), `batch` (1 week). Throws Error(InvalidArgument) otherwise.
Horizon horizon_preset(std::string_view name);

enum class SignalType { Regression, Binary, Binned };

std::string_view to_string(SignalType type) noexcept;

struct ForecastSeries {
    Timestamp issued_at;
    Horizon horizon;
    Series series;
    SignalType signal_type = SignalType::Regression;
};

/// Read-only view of the observations strictly before a cutoff. Forecasters
/// only ever receive this view, so later observations are unreachable.
class History {
public:
    History(std::shared_ptr<const Series> full, Timestamp cutoff);
    static History before(const Series& series, Timestamp cutoff);

    Timestamp cutoff() const noexcept { return cutoff_; }
    /// Number of visible steps; zero when the cutoff precedes the series.
    std::size_t size() const noexcept { return visible_; }
    bool empty() const noexcept { return visible_ == 0; }
    std::span<const Series::value_type> values() const noexcept { return full_->values().first(visible_); }
    const TimeGrid& grid() const noexcept { return full_->grid(); }
    Resolution resolution() const noexcept { return full_->grid().resolution(); }
    Unit unit() const noexcept { return full_->unit(); }
    Timestamp time_at(std::size_t i) const noexcept { return full_->grid().time_at(i); }
    /// Copy of the visible part, or nullopt when nothing is visible.
    std::optional<Series> visible_series() const;

private:
    std::shared_ptr<const Series> full_;
    Timestamp cutoff_;
    std::size_t visible_;
};

/// Immutable fitted state. Deterministic in (state, issued_at, horizon).
class FittedForecaster {
public:
    virtual ~FittedForecaster() = default;
    /// `issued_at` must not precede the cutoff of the fitted history.
    virtual ForecastSeries predict(Timestamp issued_at, const Horizon& horizon) const = 0;
};

/// Extension point for forecasting models.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual std::unique_ptr<const FittedForecaster> fit(const History& history) const = 0;
};

/// Repeats the last observed value.
class PersistenceForecaster final : public Forecaster {
public:
    std::string name() const override { return "persistence"; }
    std::unique_ptr<const FittedForecaster> fit(const History& history) const override;
};

/// Repeats the value observed 24 h earlier (or a further whole number of days
/// back, for steps more than a day past the issue time).
class DayAheadPersistenceForecaster final : public Forecaster {
public:
    std::string name() const override { return "day_ahead"; }
    std::unique_ptr<const FittedForecaster> fit(const History& history) const override;
};

/// Predicts the training median of each local time-of-day bucket.
class ClimatologyForecaster final : public Forecaster {
public:
    ClimatologyForecaster(Resolution bucket, std::string zone);
    std::string name() const override { return "climatology"; }
    std::unique_ptr<const FittedForecaster> fit(const History& history) const override;

private:
    Resolution bucket_;
    std::string zone_;
};

/// `persistence`, `day_ahead` or `climatology`; throws Error(InvalidArgument).
std::unique_ptr<Forecaster> make_forecaster(std::string_view name, Resolution bucket, std::string zone);

ForecastSeries persistence(const Series& history, Timestamp issued_at, const Horizon& horizon = {});
ForecastSeries day_ahead_persistence(const Series& history, Timestamp issued_at, const Horizon& horizon = {});
ForecastSeries climatology(const Series& history, Timestamp issued_at, const Horizon& horizon, Resolution bucket,
                           std::string_view zone);

enum class ThresholdSide {
    /// 1 where value <= threshold (price-like forecasts).
    AtOrBelow,
    /// 1 where value >= threshold (curtailment-amount forecasts).
    AtOrAbove,
};

/// Binary conversion. The side defaults to AtOrBelow for USD/MWh forecasts and
/// AtOrAbove otherwise. Discrete inputs raise Error(AlreadyDiscrete).
ForecastSeries to_signal(const ForecastSeries& forecast, double threshold,
                         std::optional<ThresholdSide> side = std::nullopt);
/// Binned conversion with the left-closed convention of `bin_signal`.
ForecastSeries to_signal(const ForecastSeries& forecast, std::span<const double> edges);

struct BacktestEntry {
    ForecastSeries forecast;
    Series actual;
};

struct BacktestResult {
    std::vector<BacktestEntry> entries;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

/// Rolling-origin evaluation: at each issue time the forecaster is fitted on
/// a History cut at that time and its prediction paired with the realised
/// window. Issue times must be strictly ascending, on-grid, and leave the
/// whole horizon inside the series (Error(ScheduleOutOfRange) otherwise).
/// Issues without usable history are skipped and counted.
BacktestResult backtest(const Forecaster& forecaster, const Series& series, std::span<const Timestamp> schedule,
                        const Horizon& horizon, std::size_t threads = 1);

/// Issue times from `first` through `last` inclusive, `every` apart.
std::vector<Timestamp> issue_schedule(Timestamp first, Timestamp last, Seconds every);

/// `issued_at,target_time,value,signal_type` rows; gaps leave `value` empty.
void write_forecast_csv(std::ostream& out, std::span<const ForecastSeries> forecasts);

} // namespace curtailkit
