#include "curtailkit/canonical.hpp"

#include "curtailkit/error.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

namespace curtailkit {
namespace {

class ByteWriter {
public:
    template <class T>
    void put(T value) {
        using U = std::make_unsigned_t<T>;
        auto u = static_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes_.push_back(static_cast<char>(u & 0xFFu));
            u = static_cast<U>(u >> 8);
        }
    }
    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void put_string(std::string_view s) {
        put(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    void put_raw(const std::vector<char>& raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }

    void flush_to(std::ostream& out) {
        out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
        bytes_.clear();
    }

private:
    std::vector<char> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::istream& in) : in_(in) {}

    void read(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            raise(ErrorCode::FormatError, "canonical cache is truncated");
        }
    }

    template <class T>
    T get() {
        std::array<unsigned char, sizeof(T)> raw{};
        read(reinterpret_cast<char*>(raw.data()), raw.size());
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = sizeof(T); i-- > 0;) {
            u = static_cast<std::make_unsigned_t<T>>((u << 8) | raw[i]);
        }
        return static_cast<T>(u);
    }

    std::string get_string(std::size_t limit) {
        const auto n = get<std::uint32_t>();
        if (n > limit) {
            raise(ErrorCode::FormatError, "string length " + std::to_string(n) + " is implausible");
        }
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }

private:
    std::istream& in_;
};

constexpr std::size_t kMaxStringLength = 1 << 16;

} // namespace

void write_canonical(std::ostream& out, const SeriesSet& series) {
    ByteWriter w;
    for (char c : kCanonicalMagic) {
        w.put(static_cast<std::uint8_t>(c));
    }
    w.put(kCanonicalFormatVersion);
    w.put(static_cast<std::uint32_t>(series.size()));
    for (const auto& [id, s] : series) {
        const TimeGrid& g = s.grid();
        w.put_string(id);
        w.put(static_cast<std::int64_t>(g.start().time_since_epoch().count()));
        w.put(static_cast<std::uint32_t>(g.resolution().seconds()));
        w.put(static_cast<std::uint64_t>(g.length()));
        w.put(static_cast<std::uint8_t>(s.unit()));
        w.put_string(g.zone());

        std::vector<char> bitmap((g.length() + 7) / 8, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i]) {
                bitmap[i / 8] = static_cast<char>(bitmap[i / 8] | (1 << (i % 8)));
            }
        }
        w.put_raw(bitmap);
        for (std::size_t i = 0; i < s.size(); ++i) {
            w.put_f64(s[i].value_or(0.0));
        }
        w.flush_to(out);
    }
    w.flush_to(out);
    if (!out) {
        raise(ErrorCode::IoError, "failed writing canonical cache");
    }
}

void write_canonical(const std::filesystem::path& path, const SeriesSet& series) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot create '" + path.string() + "'");
    }
    write_canonical(out, series);
    out.close();
    if (!out) {
        raise(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

SeriesSet read_canonical(std::istream& in) {
    ByteReader r(in);
    std::array<char, 4> magic{};
    r.read(magic.data(), magic.size());
    if (std::string_view(magic.data(), magic.size()) != kCanonicalMagic) {
        raise(ErrorCode::FormatError, "not a canonical cache (bad magic)");
    }
    const auto version = r.get<std::uint16_t>();
    if (version != kCanonicalFormatVersion) {
        raise(ErrorCode::VersionError, "canonical cache version " + std::to_string(version) +
                                           " is not supported (expected " +
                                           std::to_string(kCanonicalFormatVersion) + ")");
    }
    const auto count = r.get<std::uint32_t>();
    SeriesSet out;
    for (std::uint32_t k = 0; k < count; ++k) {
        std::string id = r.get_string(kMaxStringLength);
        const auto start = r.get<std::int64_t>();
        const auto res = r.get<std::uint32_t>();
        const auto length = r.get<std::uint64_t>();
        const auto unit_raw = r.get<std::uint8_t>();
        std::string zone = r.get_string(kMaxStringLength);
        if (unit_raw > static_cast<std::uint8_t>(Unit::BinIndex)) {
            raise(ErrorCode::FormatError, "unknown unit code " + std::to_string(unit_raw));
        }
        if (length == 0 || length > (std::uint64_t{1} << 40)) {
            raise(ErrorCode::FormatError, "implausible series length " + std::to_string(length));
        }
        std::vector<char> bitmap((length + 7) / 8);
        r.read(bitmap.data(), bitmap.size());
        std::vector<Series::value_type> values(length);
        for (std::uint64_t i = 0; i < length; ++i) {
            const double v = std::bit_cast<double>(r.get<std::uint64_t>());
            if ((bitmap[i / 8] & (1 << (i % 8))) == 0) {
                values[i] = v;
            }
        }
        try {
            TimeGrid grid(Timestamp{Seconds{start}}, length, Resolution::from_seconds(res), std::move(zone));
            Series series(std::move(grid), std::move(values), static_cast<Unit>(unit_raw));
            if (!out.emplace(std::move(id), std::move(series)).second) {
                raise(ErrorCode::FormatError, "duplicate series id in canonical cache");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::FormatError) {
                throw;
            }
            raise(ErrorCode::FormatError, std::string("invalid series block: ") + e.what());
        }
    }
    return out;
}

SeriesSet read_canonical(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    return read_canonical(in);
}

} // namespace curtailkit
