#pragma once

#include "curtailkit/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace curtailkit {

inline constexpr std::string_view kCanonicalMagic = "CKT1";
inline constexpr std::uint16_t kCanonicalFormatVersion = 1;

/// Columnar cache layout, all integers and floats little-endian:
///
///   magic "CKT1" | u16 version | u32 series_count
///   per series:
///     u32 id_len | id bytes | i64 start (unix s) | u32 resolution (s)
///     u64 length | u8 unit | u32 zone_len | zone bytes
///     gap bitmap, ceil(length / 8) bytes, bit i set = step i is a gap
///     length x f64 values (gaps stored as 0.0)
void write_canonical(std::ostream& out, const SeriesSet& series);
void write_canonical(const std::filesystem::path& path, const SeriesSet& series);

/// Throws Error(VersionError) for other format versions, Error(FormatError)
/// for bad magic or truncated/corrupt content, Error(IoError) when the file
/// cannot be opened.
SeriesSet read_canonical(std::istream& in);
SeriesSet read_canonical(const std::filesystem::path& path);

} // namespace curtailkit
