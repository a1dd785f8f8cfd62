#pragma once

#include "curtailkit/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace curtailkit {

enum class RecordKind { Lmp, Curtailment };

/// Column mapping from an ISO's native download layout to canonical records.
///
/// JSON form:
///
///     {
///       "kind": "lmp" | "curtailment",
///       "delimiter": ",",
///       "skip_lines": 0,
///       "timestamp": {"column": "Interval", "format": "%m/%d/%Y %H:%M:%S",
///                     "zone": "America/Chicago", "shift_seconds": -300},
///       "id": {"column": "Settlement Location"}  or  {"constant": "SPP"},
///       "value_column": "LMP",
///       "output_column": "Output"
///     }
///
/// `format` is `rfc3339`, `unix`, or a pattern of `%Y %m %d %H %M %S` and
/// literal characters interpreted in `zone`. `shift_seconds` moves stamps,
/// e.g. from interval-ending to interval-beginning. `value_column` holds the
/// price, MW, percent or flag, and the capability for cap_out ISOs, whose
/// output comes from `output_column`.
struct AdapterConfig {
    RecordKind kind = RecordKind::Lmp;
    char delimiter = ',';
    std::size_t skip_lines = 0;
    std::string timestamp_column;
    std::string timestamp_format = "rfc3339";
    std::string timestamp_zone = "UTC";
    std::int64_t timestamp_shift_seconds = 0;
    std::string id_column;
    std::string id_constant;
    std::string value_column;
    std::string output_column;
};

AdapterConfig parse_adapter_config(std::string_view json_text);
AdapterConfig load_adapter_config(const std::filesystem::path& path);

/// Header-driven raw readers; row errors and the error budget behave as in
/// the canonical readers. Missing mapped columns raise Error(SchemaError).
LmpParseResult adapt_lmp(std::istream& in, const AdapterConfig& config, const IsoDescriptor& descriptor,
                         ParseOptions options = {});
CurtailmentParseResult adapt_curtailment(std::istream& in, const AdapterConfig& config,
                                         const IsoDescriptor& descriptor, ParseOptions options = {});

} // namespace curtailkit
