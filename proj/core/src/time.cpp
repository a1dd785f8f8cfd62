#include "curtailkit/time.hpp"

#include "curtailkit/error.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <array>

namespace curtailkit {
namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) noexcept {
    if (pos + count > s.size()) {
        return false;
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') {
            return false;
        }
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

void put_digits(char* dst, int value, int width) noexcept {
    for (int i = width - 1; i >= 0; --i) {
        dst[i] = static_cast<char>('0' + value % 10);
        value /= 10;
    }
}

} // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view s) noexcept {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (s.size() < 20 || !read_digits(s, 0, 4, year) || s[4] != '-' || !read_digits(s, 5, 2, month) ||
        s[7] != '-' || !read_digits(s, 8, 2, day) || (s[10] != 'T' && s[10] != 't') ||
        !read_digits(s, 11, 2, hour) || s[13] != ':' || !read_digits(s, 14, 2, minute) || s[16] != ':' ||
        !read_digits(s, 17, 2, second)) {
        return std::nullopt;
    }
    if (hour > 23 || minute > 59 || second > 59) {
        return std::nullopt;
    }
    std::size_t pos = 19;
    if (s[pos] == '.') {
        ++pos;
        const std::size_t frac_start = pos;
        while (pos < s.size() && s[pos] == '0') {
            ++pos;
        }
        if (pos == frac_start || (pos < s.size() && s[pos] >= '1' && s[pos] <= '9')) {
            return std::nullopt;
        }
    }
    if (pos >= s.size()) {
        return std::nullopt;
    }
    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        if (pos + 1 != s.size()) {
            return std::nullopt;
        }
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (pos + 6 != s.size() || !read_digits(s, pos + 1, 2, oh) || s[pos + 3] != ':' ||
            !read_digits(s, pos + 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset = (oh * 3600 + om * 60) * (s[pos] == '-' ? -1 : 1);
    } else {
        return std::nullopt;
    }

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    const sys_seconds local = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
    return local - seconds{offset};
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    const sys_days day = floor<days>(t);
    const year_month_day ymd{day};
    const auto tod = t - day;
    const auto secs = tod.count();

    std::array<char, 20> buf{};
    int year = static_cast<int>(ymd.year());
    put_digits(buf.data(), year, 4);
    buf[4] = '-';
    put_digits(buf.data() + 5, static_cast<int>(static_cast<unsigned>(ymd.month())), 2);
    buf[7] = '-';
    put_digits(buf.data() + 8, static_cast<int>(static_cast<unsigned>(ymd.day())), 2);
    buf[10] = 'T';
    put_digits(buf.data() + 11, static_cast<int>(secs / 3600), 2);
    buf[13] = ':';
    put_digits(buf.data() + 14, static_cast<int>((secs / 60) % 60), 2);
    buf[16] = ':';
    put_digits(buf.data() + 17, static_cast<int>(secs % 60), 2);
    buf[19] = 'Z';
    return std::string(buf.data(), buf.size());
}

struct LocalClock::Impl {
    absl::TimeZone tz;
};

LocalClock::LocalClock(std::string_view zone) : zone_(zone) {
    auto impl = std::make_shared<Impl>();
    if (!absl::LoadTimeZone(std::string(zone), &impl->tz)) {
        raise(ErrorCode::UnknownZone, "cannot load time zone '" + std::string(zone) + "'");
    }
    impl_ = std::move(impl);
}

std::int64_t LocalClock::seconds_of_day(Timestamp t) const {
    const absl::CivilSecond cs = absl::ToCivilSecond(absl::FromUnixSeconds(t.time_since_epoch().count()), impl_->tz);
    return cs.hour() * 3600 + cs.minute() * 60 + cs.second();
}

CivilTime LocalClock::to_civil(Timestamp t) const {
    const absl::CivilSecond cs = absl::ToCivilSecond(absl::FromUnixSeconds(t.time_since_epoch().count()), impl_->tz);
    return CivilTime{static_cast<int>(cs.year()), cs.month(), cs.day(), cs.hour(), cs.minute(), cs.second()};
}

Timestamp LocalClock::from_civil(const CivilTime& c) const {
    const absl::CivilSecond cs(c.year, c.month, c.day, c.hour, c.minute, c.second);
    const absl::TimeZone::TimeInfo info = impl_->tz.At(cs);
    // `pre` applies the pre-transition offset: the first occurrence of a
    // repeated time, and the gap-shifted instant of a skipped one.
    return Timestamp{Seconds{absl::ToUnixSeconds(info.pre)}};
}

} // namespace curtailkit
