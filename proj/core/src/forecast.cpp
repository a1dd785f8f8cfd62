#include "curtailkit/forecast.hpp"

#include "curtailkit/detect.hpp"
#include "curtailkit/error.hpp"
#include "curtailkit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

namespace curtailkit {

void validate(const Horizon& horizon, Resolution resolution) {
    const std::int64_t res = resolution.seconds();
    if (horizon.lead.count() < 0 || horizon.lead.count() % res != 0) {
        raise(ErrorCode::InvalidArgument, "horizon lead must be a non-negative multiple of " + std::to_string(res) + "s");
    }
    if (horizon.length.count() <= 0 || horizon.length.count() % res != 0) {
        raise(ErrorCode::InvalidArgument, "horizon length must be a positive multiple of " + std::to_string(res) + "s");
    }
}

Horizon horizon_preset(std::string_view name) {
    using std::chrono::hours;
    if (name == "thermostat") {
        return {Seconds{0}, hours{1}};
    }
    if (name == "ev") {
        return {Seconds{0}, hours{8}};
    }
    if (name == "battery" || name == "day_ahead") {
        return {Seconds{0}, hours{24}};
    }
    if (name == "batch") {
        return {Seconds{0}, hours{24 * 7}};
    }
    raise(ErrorCode::InvalidArgument, "unknown horizon preset '" + std::string(name) + "'");
}

std::string_view to_string(SignalType type) noexcept {
    switch (type) {
    case SignalType::Regression: return "regression";
    case SignalType::Binary: return "binary";
    case SignalType::Binned: return "binned";
    }
    return "unknown";
}

History::History(std::shared_ptr<const Series> full, Timestamp cutoff) : full_(std::move(full)), cutoff_(cutoff) {
    const TimeGrid& g = full_->grid();
    if (cutoff_ <= g.start()) {
        visible_ = 0;
    } else {
        const std::int64_t span = (cutoff_ - g.start()).count();
        const std::int64_t res = g.resolution().seconds();
        visible_ = std::min(g.length(), static_cast<std::size_t>((span + res - 1) / res));
    }
}

History History::before(const Series& series, Timestamp cutoff) {
    return History(std::make_shared<const Series>(series), cutoff);
}

std::optional<Series> History::visible_series() const {
    if (visible_ == 0) {
        return std::nullopt;
    }
    return slice(*full_, 0, visible_);
}

namespace {

void check_issue(Timestamp issued_at, Timestamp cutoff, Resolution res) {
    if (issued_at < cutoff) {
        raise(ErrorCode::InvalidArgument, "cannot issue at " + format_rfc3339(issued_at) +
                                              " from a history cut at " + format_rfc3339(cutoff));
    }
    if (floor_mod(issued_at.time_since_epoch().count(), res.seconds()) != 0) {
        raise(ErrorCode::OffGrid, format_rfc3339(issued_at) + " is not aligned to the series resolution");
    }
}

TimeGrid forecast_grid(Timestamp issued_at, const Horizon& horizon, Resolution res, const std::string& zone) {
    validate(horizon, res);
    return TimeGrid(issued_at + horizon.lead, static_cast<std::size_t>(horizon.length.count() / res.seconds()), res,
                    zone);
}

class FittedPersistence final : public FittedForecaster {
public:
    FittedPersistence(double last, Timestamp cutoff, Resolution res, Unit unit, std::string zone)
        : last_(last), cutoff_(cutoff), res_(res), unit_(unit), zone_(std::move(zone)) {}

    ForecastSeries predict(Timestamp issued_at, const Horizon& horizon) const override {
        check_issue(issued_at, cutoff_, res_);
        TimeGrid grid = forecast_grid(issued_at, horizon, res_, zone_);
        std::vector<Series::value_type> values(grid.length(), last_);
        return {issued_at, horizon, Series(std::move(grid), std::move(values), unit_), SignalType::Regression};
    }

private:
    double last_;
    Timestamp cutoff_;
    Resolution res_;
    Unit unit_;
    std::string zone_;
};

class FittedDayAhead final : public FittedForecaster {
public:
    explicit FittedDayAhead(History history) : history_(std::move(history)) {}

    ForecastSeries predict(Timestamp issued_at, const Horizon& horizon) const override {
        const Resolution res = history_.resolution();
        check_issue(issued_at, history_.cutoff(), res);
        TimeGrid grid = forecast_grid(issued_at, horizon, res, history_.grid().zone());
        const auto visible = history_.values();
        const Seconds day{86400};
        std::vector<Series::value_type> values(grid.length());
        for (std::size_t i = 0; i < values.size(); ++i) {
            Timestamp source = grid.time_at(i) - day;
            while (source >= history_.cutoff()) {
                source -= day;
            }
            if (const auto idx = history_.grid().index_of(source); idx && *idx < visible.size()) {
                values[i] = visible[*idx];
            }
        }
        return {issued_at, horizon, Series(std::move(grid), std::move(values), history_.unit()),
                SignalType::Regression};
    }

private:
    History history_;
};

class FittedClimatology final : public FittedForecaster {
public:
    FittedClimatology(TimeOfDayProfile profile, Timestamp cutoff, Resolution res, Unit unit, std::string zone)
        : profile_(std::move(profile)), clock_(profile_.zone), cutoff_(cutoff), res_(res), unit_(unit),
          zone_(std::move(zone)) {}

    ForecastSeries predict(Timestamp issued_at, const Horizon& horizon) const override {
        check_issue(issued_at, cutoff_, res_);
        TimeGrid grid = forecast_grid(issued_at, horizon, res_, zone_);
        const auto buckets = local_bucket_indices(grid, profile_.bucket_width, clock_);
        std::vector<Series::value_type> values(grid.length());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (const auto& q = profile_.buckets[buckets[i]].quartiles) {
                values[i] = q->median;
            }
        }
        return {issued_at, horizon, Series(std::move(grid), std::move(values), unit_), SignalType::Regression};
    }

private:
    TimeOfDayProfile profile_;
    LocalClock clock_;
    Timestamp cutoff_;
    Resolution res_;
    Unit unit_;
    std::string zone_;
};

} // namespace

std::unique_ptr<const FittedForecaster> PersistenceForecaster::fit(const History& history) const {
    const auto values = history.values();
    for (std::size_t i = values.size(); i-- > 0;) {
        if (values[i]) {
            return std::make_unique<FittedPersistence>(*values[i], history.cutoff(), history.resolution(),
                                                       history.unit(), history.grid().zone());
        }
    }
    raise(ErrorCode::NoHistory, "no observation before " + format_rfc3339(history.cutoff()));
}

std::unique_ptr<const FittedForecaster> DayAheadPersistenceForecaster::fit(const History& history) const {
    const TimeGrid& g = history.grid();
    if (g.start() > history.cutoff() - Seconds{86400} || g.end() < history.cutoff()) {
        raise(ErrorCode::InsufficientHistory,
              "day-ahead persistence needs the 24 h before " + format_rfc3339(history.cutoff()));
    }
    return std::make_unique<FittedDayAhead>(history);
}

ClimatologyForecaster::ClimatologyForecaster(Resolution bucket, std::string zone)
    : bucket_(bucket), zone_(std::move(zone)) {
    LocalClock probe(zone_);
}

std::unique_ptr<const FittedForecaster> ClimatologyForecaster::fit(const History& history) const {
    const auto visible = history.visible_series();
    if (!visible || visible->gap_count() == visible->size()) {
        raise(ErrorCode::NoHistory, "no observation before " + format_rfc3339(history.cutoff()));
    }
    Unit unit = history.unit();
    if (unit == Unit::BinIndex) {
        raise(ErrorCode::UnitMismatch, "climatology of bin indices is not defined");
    }
    if (unit == Unit::Boolean01) {
        unit = Unit::Fraction;
    }
    return std::make_unique<FittedClimatology>(time_of_day_profile(*visible, bucket_, zone_), history.cutoff(),
                                               history.resolution(), unit, history.grid().zone());
}

std::unique_ptr<Forecaster> make_forecaster(std::string_view name, Resolution bucket, std::string zone) {
    if (name == "persistence") {
        return std::make_unique<PersistenceForecaster>();
    }
    if (name == "day_ahead") {
        return std::make_unique<DayAheadPersistenceForecaster>();
    }
    if (name == "climatology") {
        return std::make_unique<ClimatologyForecaster>(bucket, std::move(zone));
    }
    raise(ErrorCode::InvalidArgument, "unknown forecaster '" + std::string(name) + "'");
}

ForecastSeries persistence(const Series& history, Timestamp issued_at, const Horizon& horizon) {
    return PersistenceForecaster{}.fit(History::before(history, issued_at))->predict(issued_at, horizon);
}

ForecastSeries day_ahead_persistence(const Series& history, Timestamp issued_at, const Horizon& horizon) {
    return DayAheadPersistenceForecaster{}.fit(History::before(history, issued_at))->predict(issued_at, horizon);
}

ForecastSeries climatology(const Series& history, Timestamp issued_at, const Horizon& horizon, Resolution bucket,
                           std::string_view zone) {
    return ClimatologyForecaster(bucket, std::string(zone))
        .fit(History::before(history, issued_at))
        ->predict(issued_at, horizon);
}

ForecastSeries to_signal(const ForecastSeries& forecast, double threshold, std::optional<ThresholdSide> side) {
    if (forecast.signal_type != SignalType::Regression) {
        raise(ErrorCode::AlreadyDiscrete, "forecast is already a " + std::string(to_string(forecast.signal_type)) +
                                              " signal");
    }
    if (std::isnan(threshold)) {
        raise(ErrorCode::InvalidArgument, "threshold is NaN");
    }
    const ThresholdSide s =
        side.value_or(forecast.series.unit() == Unit::UsdPerMwh ? ThresholdSide::AtOrBelow : ThresholdSide::AtOrAbove);
    std::vector<Series::value_type> values(forecast.series.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (const auto& v = forecast.series[i]) {
            const bool hit = s == ThresholdSide::AtOrBelow ? *v <= threshold : *v >= threshold;
            values[i] = hit ? 1.0 : 0.0;
        }
    }
    return {forecast.issued_at, forecast.horizon, Series(forecast.series.grid(), std::move(values), Unit::Boolean01),
            SignalType::Binary};
}

ForecastSeries to_signal(const ForecastSeries& forecast, std::span<const double> edges) {
    if (forecast.signal_type != SignalType::Regression) {
        raise(ErrorCode::AlreadyDiscrete, "forecast is already a " + std::string(to_string(forecast.signal_type)) +
                                              " signal");
    }
    return {forecast.issued_at, forecast.horizon, bin_signal(forecast.series, edges).series, SignalType::Binned};
}

BacktestResult backtest(const Forecaster& forecaster, const Series& series, std::span<const Timestamp> schedule,
                        const Horizon& horizon, std::size_t threads) {
    const TimeGrid& g = series.grid();
    validate(horizon, g.resolution());
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const Timestamp t = schedule[k];
        if (!g.is_on_grid(t)) {
            raise(ErrorCode::ScheduleOutOfRange, format_rfc3339(t) + " is not on the series grid");
        }
        if (k > 0 && !(t > schedule[k - 1])) {
            raise(ErrorCode::ScheduleOutOfRange, "issue times must be strictly ascending");
        }
        if (t < g.start() || t + horizon.lead + horizon.length > g.end()) {
            raise(ErrorCode::ScheduleOutOfRange,
                  "horizon issued at " + format_rfc3339(t) + " is not covered by the series");
        }
    }

    const auto full = std::make_shared<const Series>(series);
    struct Slot {
        std::optional<BacktestEntry> entry;
        std::string warning;
    };
    std::vector<Slot> slots(schedule.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const Timestamp t = schedule[k];
            try {
                const auto fitted = forecaster.fit(History(full, t));
                ForecastSeries f = fitted->predict(t, horizon);
                Series actual = window(*full, t + horizon.lead, horizon.length);
                slots[k].entry = BacktestEntry{std::move(f), std::move(actual)};
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoHistory && e.code() != ErrorCode::InsufficientHistory) {
                    throw;
                }
                slots[k].warning = format_rfc3339(t) + ": " + e.what();
            }
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, schedule.size()));
    if (threads == 1) {
        work(0, schedule.size());
    } else {
        std::vector<std::exception_ptr> failures(threads);
        {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (schedule.size() + threads - 1) / threads;
            for (std::size_t w = 0, begin = 0; begin < schedule.size(); ++w, begin += chunk) {
                pool.emplace_back([&, w, begin] {
                    try {
                        work(begin, std::min(schedule.size(), begin + chunk));
                    } catch (...) {
                        failures[w] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& f : failures) {
            if (f) {
                std::rethrow_exception(f);
            }
        }
    }

    BacktestResult result;
    for (auto& s : slots) {
        if (s.entry) {
            result.entries.push_back(std::move(*s.entry));
        } else {
            ++result.skipped;
            result.warnings.push_back(std::move(s.warning));
        }
    }
    return result;
}

std::vector<Timestamp> issue_schedule(Timestamp first, Timestamp last, Seconds every) {
    if (every.count() <= 0) {
        raise(ErrorCode::InvalidArgument, "issue interval must be positive");
    }
    std::vector<Timestamp> out;
    for (Timestamp t = first; t <= last; t += every) {
        out.push_back(t);
    }
    return out;
}

void write_forecast_csv(std::ostream& out, std::span<const ForecastSeries> forecasts) {
    out << "issued_at,target_time,value,signal_type\n";
    for (const auto& f : forecasts) {
        const std::string issued = format_rfc3339(f.issued_at);
        const std::string_view type = to_string(f.signal_type);
        for (std::size_t i = 0; i < f.series.size(); ++i) {
            out << issued << ',' << format_rfc3339(f.series.grid().time_at(i)) << ',';
            if (f.series[i]) {
                out << format_double(*f.series[i]);
            }
            out << ',' << type << '\n';
        }
    }
}

} // namespace curtailkit
