#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace curtailkit {

/// Canonical instants are whole UTC seconds since the Unix epoch.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses `YYYY-MM-DDTHH:MM:SS` followed by `Z` or a `+HH:MM`/`-HH:MM`
/// offset. A fractional-seconds part is accepted only if it is all zeros.
std::optional<Timestamp> parse_rfc3339(std::string_view text) noexcept;

/// Always emits the `Z` form, e.g. `2022-06-01T07:05:00Z`.
std::string format_rfc3339(Timestamp t);

/// Floor division that rounds toward negative infinity.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    const std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) noexcept {
    return a - floor_div(a, b) * b;
}

struct CivilTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;
};

/// IANA zone lookup for wall-clock conversions. Copies share the loaded
/// zone data; all members are const and safe to call concurrently.
class LocalClock {
public:
    /// Throws Error(UnknownZone) when the zone cannot be loaded.
    explicit LocalClock(std::string_view zone);

    const std::string& zone() const noexcept { return zone_; }

    /// Local wall-clock seconds since local midnight, in [0, 86400).
    std::int64_t seconds_of_day(Timestamp t) const;

    CivilTime to_civil(Timestamp t) const;

    /// Converts a local wall-clock time to UTC. Repeated (autumn) times map
    /// to the earlier instant; skipped (spring) times are shifted forward by
    /// the size of the gap.
    Timestamp from_civil(const CivilTime& civil) const;

private:
    struct Impl;
    std::string zone_;
    std::shared_ptr<const Impl> impl_;
};

} // namespace curtailkit
