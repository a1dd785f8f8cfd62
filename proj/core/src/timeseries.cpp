#include "curtailkit/timeseries.hpp"

#include "curtailkit/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

namespace curtailkit {

std::string_view to_string(Unit unit) noexcept {
    switch (unit) {
    case Unit::UsdPerMwh: return "USD_per_MWh";
    case Unit::Mw: return "MW";
    case Unit::Fraction: return "fraction";
    case Unit::Boolean01: return "boolean01";
    case Unit::BinIndex: return "bin_index";
    }
    return "unknown";
}

std::optional<Unit> unit_from_string(std::string_view text) noexcept {
    for (Unit u : {Unit::UsdPerMwh, Unit::Mw, Unit::Fraction, Unit::Boolean01, Unit::BinIndex}) {
        if (to_string(u) == text) {
            return u;
        }
    }
    return std::nullopt;
}

Resolution Resolution::from_seconds(std::int64_t seconds) {
    if (seconds <= 0 || 86400 % seconds != 0) {
        raise(ErrorCode::InvalidArgument,
              "resolution must be positive and divide 86400, got " + std::to_string(seconds));
    }
    return Resolution(seconds);
}

TimeGrid::TimeGrid(Timestamp start, std::size_t length, Resolution resolution, std::string zone)
    : start_(start), length_(length), resolution_(resolution), zone_(std::move(zone)) {
    if (length_ == 0) {
        raise(ErrorCode::InvalidArgument, "time grid must have at least one step");
    }
    if (floor_mod(start_.time_since_epoch().count(), resolution_.seconds()) != 0) {
        raise(ErrorCode::InvalidArgument,
              "grid start " + format_rfc3339(start_) + " is not aligned to " +
                  std::to_string(resolution_.seconds()) + "s");
    }
}

bool TimeGrid::is_on_grid(Timestamp t) const noexcept {
    return floor_mod((t - start_).count(), resolution_.seconds()) == 0;
}

std::optional<std::size_t> TimeGrid::index_of(Timestamp t) const noexcept {
    if (t < start_ || !is_on_grid(t)) {
        return std::nullopt;
    }
    const auto index = static_cast<std::size_t>((t - start_).count() / resolution_.seconds());
    if (index >= length_) {
        return std::nullopt;
    }
    return index;
}

Series::Series(TimeGrid grid, std::vector<value_type> values, Unit unit)
    : grid_(std::move(grid)), values_(std::move(values)), unit_(unit) {
    if (values_.size() != grid_.length()) {
        raise(ErrorCode::InvalidArgument, "series has " + std::to_string(values_.size()) +
                                              " values for a grid of " + std::to_string(grid_.length()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!values_[i]) {
            continue;
        }
        const double v = *values_[i];
        bool ok = std::isfinite(v);
        switch (unit_) {
        case Unit::Boolean01: ok = ok && (v == 0.0 || v == 1.0); break;
        case Unit::Fraction: ok = ok && v >= 0.0 && v <= 1.0; break;
        case Unit::BinIndex: ok = ok && v >= 0.0 && v == std::floor(v); break;
        case Unit::UsdPerMwh:
        case Unit::Mw: break;
        }
        if (!ok) {
            raise(ErrorCode::InvalidArgument, "value at step " + std::to_string(i) + " is invalid for unit " +
                                                  std::string(to_string(unit_)));
        }
    }
}

std::size_t Series::gap_count() const noexcept {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::nullopt));
}

bool bit_identical(const Series& a, const Series& b) noexcept {
    if (a.grid() != b.grid() || a.unit() != b.unit() || a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].has_value() != b[i].has_value()) {
            return false;
        }
        if (a[i] && std::bit_cast<std::uint64_t>(*a[i]) != std::bit_cast<std::uint64_t>(*b[i])) {
            return false;
        }
    }
    return true;
}

bool bit_identical(const SeriesSet& a, const SeriesSet& b) noexcept {
    if (a.size() != b.size()) {
        return false;
    }
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !bit_identical(ia->second, ib->second)) {
            return false;
        }
    }
    return true;
}

namespace {

Unit resampled_unit(Unit unit, AggregateMode mode) {
    switch (mode) {
    case AggregateMode::Min:
    case AggregateMode::Max:
        return unit;
    case AggregateMode::Mean:
        if (unit == Unit::BinIndex) {
            raise(ErrorCode::UnitMismatch, "mean of bin indices is not defined");
        }
        return unit == Unit::Boolean01 ? Unit::Fraction : unit;
    case AggregateMode::Sum:
        if (unit == Unit::Boolean01 || unit == Unit::Fraction || unit == Unit::BinIndex) {
            raise(ErrorCode::UnitMismatch, "sum is only defined for MW and price series");
        }
        return unit;
    }
    return unit;
}

} // namespace

Series resample(const Series& series, Resolution target, AggregateMode mode, ResampleOptions options) {
    const std::int64_t source_seconds = series.grid().resolution().seconds();
    if (target.seconds() < source_seconds) {
        raise(ErrorCode::UpsampleRequested, "target resolution is finer than the source");
    }
    if (target.seconds() % source_seconds != 0) {
        raise(ErrorCode::NonIntegerRatio, std::to_string(target.seconds()) + "s is not a multiple of " +
                                              std::to_string(source_seconds) + "s");
    }
    if (!(options.gap_tolerance >= 0.0 && options.gap_tolerance <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "gap tolerance must lie in [0, 1]");
    }
    const Unit unit = resampled_unit(series.unit(), mode);
    if (target == series.grid().resolution()) {
        return series;
    }

    const auto ratio = target.seconds() / source_seconds;
    const std::int64_t start = series.grid().start().time_since_epoch().count();
    const std::int64_t end = series.grid().end().time_since_epoch().count();
    const std::int64_t out_start = floor_div(start, target.seconds()) * target.seconds();
    const std::int64_t out_end = -floor_div(-end, target.seconds()) * target.seconds();
    const auto out_length = static_cast<std::size_t>((out_end - out_start) / target.seconds());
    // Position of the first output step's first input, relative to the series start.
    const std::int64_t first_offset = (out_start - start) / source_seconds;
    const auto n = static_cast<std::int64_t>(series.size());
    const auto values = series.values();

    std::vector<Series::value_type> out(out_length);
    for (std::size_t j = 0; j < out_length; ++j) {
        const std::int64_t lo = first_offset + static_cast<std::int64_t>(j) * ratio;
        std::int64_t present = 0;
        double acc = 0.0;
        for (std::int64_t i = lo; i < lo + ratio; ++i) {
            if (i < 0 || i >= n || !values[static_cast<std::size_t>(i)]) {
                continue;
            }
            const double v = *values[static_cast<std::size_t>(i)];
            if (present == 0) {
                acc = v;
            } else {
                switch (mode) {
                case AggregateMode::Mean:
                case AggregateMode::Sum: acc += v; break;
                case AggregateMode::Min: acc = std::min(acc, v); break;
                case AggregateMode::Max: acc = std::max(acc, v); break;
                }
            }
            ++present;
        }
        const auto gaps = ratio - present;
        if (present == 0 || static_cast<double>(gaps) > options.gap_tolerance * static_cast<double>(ratio)) {
            continue;
        }
        out[j] = mode == AggregateMode::Mean ? acc / static_cast<double>(present) : acc;
    }
    return Series(TimeGrid(Timestamp{Seconds{out_start}}, out_length, target, series.grid().zone()), std::move(out),
                  unit);
}

std::pair<Series, Series> align(const Series& a, const Series& b) {
    const TimeGrid& ga = a.grid();
    const TimeGrid& gb = b.grid();
    if (ga.resolution() != gb.resolution()) {
        raise(ErrorCode::ResolutionMismatch, "cannot align " + std::to_string(ga.resolution().seconds()) + "s with " +
                                                 std::to_string(gb.resolution().seconds()) + "s series");
    }
    if (ga.same_steps(gb)) {
        return {a, b};
    }
    const Timestamp start = std::max(ga.start(), gb.start());
    const Timestamp end = std::min(ga.end(), gb.end());
    if (start >= end) {
        raise(ErrorCode::EmptyOverlap, "series grids do not overlap");
    }
    const auto length = static_cast<std::size_t>((end - start).count() / ga.resolution().seconds());
    return {slice(a, *ga.index_of(start), length), slice(b, *gb.index_of(start), length)};
}

Series slice(const Series& series, std::size_t first, std::size_t count) {
    if (count == 0 || first > series.size() || count > series.size() - first) {
        raise(ErrorCode::OutOfRange, "slice [" + std::to_string(first) + ", +" + std::to_string(count) +
                                         ") outside series of length " + std::to_string(series.size()));
    }
    const auto values = series.values();
    std::vector<Series::value_type> out(values.begin() + static_cast<std::ptrdiff_t>(first),
                                        values.begin() + static_cast<std::ptrdiff_t>(first + count));
    const TimeGrid& g = series.grid();
    return Series(TimeGrid(g.time_at(first), count, g.resolution(), g.zone()), std::move(out), series.unit());
}

Series window(const Series& series, Timestamp t, Seconds w) {
    const TimeGrid& g = series.grid();
    const std::int64_t res = g.resolution().seconds();
    if (w.count() <= 0 || w.count() % res != 0) {
        raise(ErrorCode::OffGrid, "window length " + std::to_string(w.count()) + "s is not a positive multiple of " +
                                      std::to_string(res) + "s");
    }
    if (!g.is_on_grid(t)) {
        raise(ErrorCode::OffGrid, format_rfc3339(t) + " is not on the series grid");
    }
    if (t < g.start() || t + w > g.end()) {
        raise(ErrorCode::OutOfRange, "window at " + format_rfc3339(t) + " extends outside the series");
    }
    return slice(series, *g.index_of(t), static_cast<std::size_t>(w.count() / res));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        raise(ErrorCode::InvalidArgument, "quantile of an empty sample");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_bucket(const TimeGrid& grid, Resolution bucket) {
    const std::int64_t res = grid.resolution().seconds();
    if (bucket.seconds() < res || bucket.seconds() % res != 0) {
        raise(ErrorCode::BadBucket, "bucket of " + std::to_string(bucket.seconds()) +
                                        "s is not a multiple of the " + std::to_string(res) + "s grid");
    }
}

std::vector<std::uint32_t> local_bucket_indices(const TimeGrid& grid, Resolution bucket, const LocalClock& clock) {
    std::vector<std::uint32_t> out(grid.length());
    const bool utc = clock.zone() == "UTC" || clock.zone() == "Etc/UTC";
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Timestamp t = grid.time_at(i);
        const std::int64_t sod =
            utc ? floor_mod(t.time_since_epoch().count(), 86400) : clock.seconds_of_day(t);
        out[i] = static_cast<std::uint32_t>(sod / bucket.seconds());
    }
    return out;
}

TimeOfDayProfile time_of_day_profile(const Series& series, Resolution bucket, std::string_view zone) {
    check_bucket(series.grid(), bucket);
    const LocalClock clock(zone);
    const auto indices = local_bucket_indices(series.grid(), bucket, clock);
    const auto bucket_count = static_cast<std::size_t>(86400 / bucket.seconds());

    std::vector<std::vector<double>> samples(bucket_count);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i]) {
            samples[indices[i]].push_back(*series[i]);
        }
    }

    TimeOfDayProfile profile{bucket, std::string(zone), std::vector<BucketStats>(bucket_count)};
    for (std::size_t b = 0; b < bucket_count; ++b) {
        auto& s = samples[b];
        profile.buckets[b].count = s.size();
        if (s.empty()) {
            continue;
        }
        std::sort(s.begin(), s.end());
        profile.buckets[b].quartiles =
            QuartileSummary{quantile_sorted(s, 0.25), quantile_sorted(s, 0.5), quantile_sorted(s, 0.75)};
    }
    return profile;
}

std::string format_time_of_day(std::int64_t seconds_of_day) {
    char buf[16];
    const auto h = static_cast<int>(seconds_of_day / 3600);
    const auto m = static_cast<int>((seconds_of_day / 60) % 60);
    const auto s = static_cast<int>(seconds_of_day % 60);
    if (s == 0) {
        std::snprintf(buf, sizeof buf, "%02d:%02d", h, m);
    } else {
        std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", h, m, s);
    }
    return buf;
}

} // namespace curtailkit
