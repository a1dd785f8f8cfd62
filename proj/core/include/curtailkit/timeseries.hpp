#pragma once

#include "curtailkit/time.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curtailkit {

enum class Unit : std::uint8_t {
    UsdPerMwh = 0,
    Mw = 1,
    Fraction = 2,
    Boolean01 = 3,
    /// Small non-negative integers produced by binned signals.
    BinIndex = 4,
};

std::string_view to_string(Unit unit) noexcept;
std::optional<Unit> unit_from_string(std::string_view text) noexcept;

/// Grid step length. Must be positive and divide a day evenly.
class Resolution {
public:
    static Resolution from_seconds(std::int64_t seconds);
    static constexpr Resolution five_minute() noexcept { return Resolution(300); }
    static constexpr Resolution hourly() noexcept { return Resolution(3600); }

    constexpr std::int64_t seconds() const noexcept { return seconds_; }
    constexpr Seconds duration() const noexcept { return Seconds{seconds_}; }

    /// True for the settlement periods ISO feeds publish (5-minute, hourly).
    constexpr bool is_declared() const noexcept { return seconds_ == 300 || seconds_ == 3600; }

    constexpr auto operator<=>(const Resolution&) const = default;

private:
    constexpr explicit Resolution(std::int64_t seconds) noexcept : seconds_(seconds) {}
    std::int64_t seconds_;
};

/// Uniform UTC grid `[start, start + length * resolution)`.
class TimeGrid {
public:
    TimeGrid(Timestamp start, std::size_t length, Resolution resolution, std::string zone = "UTC");

    Timestamp start() const noexcept { return start_; }
    std::size_t length() const noexcept { return length_; }
    Resolution resolution() const noexcept { return resolution_; }
    /// Zone used only for local time-of-day bucketing.
    const std::string& zone() const noexcept { return zone_; }

    Timestamp end() const noexcept { return time_at(length_); }
    Timestamp time_at(std::size_t index) const noexcept {
        return start_ + Seconds{static_cast<std::int64_t>(index) * resolution_.seconds()};
    }
    /// Index of `t` if it is on-grid and inside `[start, end)`.
    std::optional<std::size_t> index_of(Timestamp t) const noexcept;
    bool is_on_grid(Timestamp t) const noexcept;

    /// Same steps regardless of zone.
    bool same_steps(const TimeGrid& other) const noexcept {
        return start_ == other.start_ && length_ == other.length_ && resolution_ == other.resolution_;
    }

    bool operator==(const TimeGrid&) const = default;

private:
    Timestamp start_;
    std::size_t length_;
    Resolution resolution_;
    std::string zone_;
};

/// Values on a grid; `std::nullopt` marks a gap. Immutable after construction.
class Series {
public:
    using value_type = std::optional<double>;

    Series(TimeGrid grid, std::vector<value_type> values, Unit unit);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const value_type> values() const noexcept { return values_; }
    Unit unit() const noexcept { return unit_; }
    std::size_t size() const noexcept { return values_.size(); }
    const value_type& operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t gap_count() const noexcept;

    bool operator==(const Series&) const = default;

private:
    TimeGrid grid_;
    std::vector<value_type> values_;
    Unit unit_;
};

/// Series keyed by node or region id, ordered for deterministic output.
using SeriesSet = std::map<std::string, Series, std::less<>>;

/// Same grid, unit and bit-identical values (distinguishes -0.0 from 0.0).
bool bit_identical(const Series& a, const Series& b) noexcept;
bool bit_identical(const SeriesSet& a, const SeriesSet& b) noexcept;

enum class AggregateMode { Mean, Sum, Min, Max };

struct ResampleOptions {
    /// Largest tolerated fraction of gap inputs in an output step; 0 is strict.
    double gap_tolerance = 0.0;
};

/// Downsamples onto `target`. The output grid is `target`-aligned and covers
/// every input step; inputs outside the source grid count as gaps.
/// Mean of a boolean01 series yields a fraction series.
Series resample(const Series& series, Resolution target, AggregateMode mode, ResampleOptions options = {});

/// Restricts both series to the intersection of their grids.
std::pair<Series, Series> align(const Series& a, const Series& b);

/// The `w / resolution` steps starting at `t`.
Series window(const Series& series, Timestamp t, Seconds w);

/// Positional slice `[first, first + count)`.
Series slice(const Series& series, std::size_t first, std::size_t count);

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending, non-empty range.
double quantile_sorted(std::span<const double> sorted, double p);

struct QuartileSummary {
    double q25;
    double median;
    double q75;
};

struct BucketStats {
    std::size_t count = 0;
    std::optional<QuartileSummary> quartiles;
};

/// Local time-of-day distribution of a series.
struct TimeOfDayProfile {
    Resolution bucket_width;
    std::string zone;
    std::vector<BucketStats> buckets;

    std::size_t bucket_count() const noexcept { return buckets.size(); }
    /// Local seconds since midnight where bucket `i` starts.
    std::int64_t bucket_start_seconds(std::size_t i) const noexcept {
        return static_cast<std::int64_t>(i) * bucket_width.seconds();
    }
};

/// Throws Error(BadBucket) unless `bucket` is a whole multiple of the grid
/// resolution.
void check_bucket(const TimeGrid& grid, Resolution bucket);

/// Local time-of-day bucket index for every grid step.
std::vector<std::uint32_t> local_bucket_indices(const TimeGrid& grid, Resolution bucket, const LocalClock& clock);

TimeOfDayProfile time_of_day_profile(const Series& series, Resolution bucket, std::string_view zone);

/// `HH:MM` (or `HH:MM:SS` when needed) label for a local bucket start.
std::string format_time_of_day(std::int64_t seconds_of_day);

} // namespace curtailkit
