#include "curtailkit/adapter.hpp"

#include "curtailkit/error.hpp"
#include "line_reader.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace curtailkit {

using nlohmann::json;

AdapterConfig parse_adapter_config(std::string_view json_text) {
    AdapterConfig c;
    try {
        const json j = json::parse(json_text);
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "lmp") {
            c.kind = RecordKind::Lmp;
        } else if (kind == "curtailment") {
            c.kind = RecordKind::Curtailment;
        } else {
            raise(ErrorCode::ConfigError, "adapter kind must be 'lmp' or 'curtailment', got '" + kind + "'");
        }
        if (j.contains("delimiter")) {
            const auto d = j.at("delimiter").get<std::string>();
            if (d.size() != 1) {
                raise(ErrorCode::ConfigError, "delimiter must be a single character");
            }
            c.delimiter = d.front();
        }
        c.skip_lines = j.value("skip_lines", std::size_t{0});
        const json& ts = j.at("timestamp");
        c.timestamp_column = ts.at("column").get<std::string>();
        c.timestamp_format = ts.value("format", std::string("rfc3339"));
        c.timestamp_zone = ts.value("zone", std::string("UTC"));
        c.timestamp_shift_seconds = ts.value("shift_seconds", std::int64_t{0});
        const json& id = j.at("id");
        c.id_column = id.value("column", std::string());
        c.id_constant = id.value("constant", std::string());
        if (c.id_column.empty() == c.id_constant.empty()) {
            raise(ErrorCode::ConfigError, "adapter id needs exactly one of 'column' or 'constant'");
        }
        c.value_column = j.at("value_column").get<std::string>();
        c.output_column = j.value("output_column", std::string());
    } catch (const json::exception& e) {
        raise(ErrorCode::ConfigError, std::string("malformed adapter config: ") + e.what());
    }
    return c;
}

AdapterConfig load_adapter_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open adapter config '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_adapter_config(buf.str());
}

namespace {

bool read_int(std::string_view s, std::size_t& pos, std::size_t max_digits, int& out) {
    std::size_t n = 0;
    int v = 0;
    while (pos < s.size() && n < max_digits && s[pos] >= '0' && s[pos] <= '9') {
        v = v * 10 + (s[pos] - '0');
        ++pos;
        ++n;
    }
    out = v;
    return n > 0;
}

/// Timestamp decoding for one adapter: RFC 3339, unix seconds or a civil
/// pattern in a named zone.
class TimestampDecoder {
public:
    explicit TimestampDecoder(const AdapterConfig& c)
        : format_(c.timestamp_format), shift_(c.timestamp_shift_seconds) {
        if (format_ != "rfc3339" && format_ != "unix") {
            clock_.emplace(c.timestamp_zone);
        }
    }

    std::optional<Timestamp> decode(std::string_view text) const {
        std::optional<Timestamp> t;
        if (format_ == "rfc3339") {
            t = parse_rfc3339(text);
        } else if (format_ == "unix") {
            std::int64_t v = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec == std::errc() && ptr == text.data() + text.size()) {
                t = Timestamp{Seconds{v}};
            }
        } else {
            t = decode_pattern(text);
        }
        if (t) {
            *t += Seconds{shift_};
        }
        return t;
    }

private:
    std::optional<Timestamp> decode_pattern(std::string_view text) const {
        CivilTime c;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < format_.size(); ++i) {
            const char f = format_[i];
            if (f == '%' && i + 1 < format_.size()) {
                const char spec = format_[++i];
                bool ok = true;
                switch (spec) {
                case 'Y': ok = read_int(text, pos, 4, c.year); break;
                case 'm': ok = read_int(text, pos, 2, c.month); break;
                case 'd': ok = read_int(text, pos, 2, c.day); break;
                case 'H': ok = read_int(text, pos, 2, c.hour); break;
                case 'M': ok = read_int(text, pos, 2, c.minute); break;
                case 'S': ok = read_int(text, pos, 2, c.second); break;
                case '%': ok = pos < text.size() && text[pos++] == '%'; break;
                default: ok = false;
                }
                if (!ok) {
                    return std::nullopt;
                }
            } else if (pos >= text.size() || text[pos++] != f) {
                return std::nullopt;
            }
        }
        if (pos != text.size() || c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 24 ||
            c.minute > 59 || c.second > 59) {
            return std::nullopt;
        }
        // Hour-ending feeds label the last interval of a day as 24:00.
        const bool hour24 = c.hour == 24;
        if (hour24) {
            if (c.minute != 0 || c.second != 0) {
                return std::nullopt;
            }
            c.hour = 23;
        }
        Timestamp t = clock_->from_civil(c);
        if (hour24) {
            t += Seconds{3600};
        }
        return t;
    }

    std::string format_;
    std::int64_t shift_;
    std::optional<LocalClock> clock_;
};

struct ColumnMap {
    std::size_t timestamp = 0;
    std::optional<std::size_t> id;
    std::size_t value = 0;
    std::optional<std::size_t> output;
    std::size_t width = 0;
};

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string_view h = header[i];
        while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) {
            h.remove_prefix(1);
        }
        while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) {
            h.remove_suffix(1);
        }
        if (h == name) {
            return i;
        }
    }
    raise(ErrorCode::SchemaError, "raw file has no column '" + name + "'");
}

/// Skips preamble lines and maps configured column names to positions.
ColumnMap read_raw_header(detail::LineReader& reader, const AdapterConfig& c, bool needs_output) {
    std::string_view line;
    for (std::size_t i = 0; i < c.skip_lines; ++i) {
        if (!reader.next(line)) {
            raise(ErrorCode::SchemaError, "raw file ended inside the preamble");
        }
    }
    if (!reader.next(line)) {
        raise(ErrorCode::SchemaError, "raw file has no header row");
    }
    if (line.substr(0, 3) == "\xEF\xBB\xBF") {
        line.remove_prefix(3);
    }
    const auto header = detail::split_quoted(line, c.delimiter);
    ColumnMap m;
    m.timestamp = find_column(header, c.timestamp_column);
    if (!c.id_column.empty()) {
        m.id = find_column(header, c.id_column);
    }
    m.value = find_column(header, c.value_column);
    if (needs_output) {
        if (c.output_column.empty()) {
            raise(ErrorCode::ConfigError, "cap_out adapters need an output_column");
        }
        m.output = find_column(header, c.output_column);
    }
    m.width = header.size();
    return m;
}

bool parse_flag_token(std::string_view t, bool& out) {
    std::string lower(t);
    for (auto& ch : lower) {
        ch = static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch);
    }
    if (lower == "1" || lower == "true" || lower == "y" || lower == "yes") {
        out = true;
        return true;
    }
    if (lower == "0" || lower == "false" || lower == "n" || lower == "no" || lower.empty()) {
        out = false;
        return true;
    }
    return false;
}

template <class Record, class MakeRecord>
std::pair<std::vector<Record>, ParseReport> adapt_rows(std::istream& in, const AdapterConfig& c, bool needs_output,
                                                       const ParseOptions& options, MakeRecord make) {
    detail::LineReader reader(in);
    const ColumnMap m = read_raw_header(reader, c, needs_output);
    const TimestampDecoder decoder(c);
    std::vector<Record> records;
    ParseReport report;
    std::string_view line;
    while (reader.next(line)) {
        if (line.empty()) {
            continue;
        }
        ++report.rows;
        const std::size_t line_no = reader.line_number();
        const auto fields = detail::split_quoted(line, c.delimiter);
        if (fields.size() != m.width) {
            report.errors.push_back({line_no, "expected " + std::to_string(m.width) + " fields, got " +
                                                  std::to_string(fields.size())});
            continue;
        }
        const auto ts = decoder.decode(fields[m.timestamp]);
        if (!ts) {
            report.errors.push_back({line_no, "bad timestamp '" + fields[m.timestamp] + "'"});
            continue;
        }
        const std::string& id = m.id ? fields[*m.id] : c.id_constant;
        if (id.empty()) {
            report.errors.push_back({line_no, "empty id"});
            continue;
        }
        std::string message;
        if (auto record = make(id, *ts, fields, m, message)) {
            records.push_back(std::move(*record));
        } else {
            report.errors.push_back({line_no, std::move(message)});
        }
    }
    enforce_error_budget(report, options);
    return {std::move(records), std::move(report)};
}

bool parse_number(const std::string& text, double& out) {
    std::string_view v = text;
    while (!v.empty() && v.front() == ' ') {
        v.remove_prefix(1);
    }
    while (!v.empty() && v.back() == ' ') {
        v.remove_suffix(1);
    }
    return detail::parse_double(v, out) && std::isfinite(out);
}

} // namespace

LmpParseResult adapt_lmp(std::istream& in, const AdapterConfig& config, const IsoDescriptor& descriptor,
                         ParseOptions options) {
    if (config.kind != RecordKind::Lmp) {
        raise(ErrorCode::ConfigError, "adapter is not an LMP adapter");
    }
    (void)descriptor;
    auto [records, report] = adapt_rows<LmpRecord>(
        in, config, false, options,
        [&](const std::string& id, Timestamp ts, const std::vector<std::string>& f, const ColumnMap& m,
            std::string& message) -> std::optional<LmpRecord> {
            double price = 0.0;
            if (!parse_number(f[m.value], price)) {
                message = "bad price '" + f[m.value] + "'";
                return std::nullopt;
            }
            if (std::abs(price) > options.price_bound) {
                message = "price " + f[m.value] + " exceeds sanity bound";
                return std::nullopt;
            }
            return LmpRecord{id, ts, price};
        });
    return {std::move(records), std::move(report)};
}

CurtailmentParseResult adapt_curtailment(std::istream& in, const AdapterConfig& config,
                                         const IsoDescriptor& descriptor, ParseOptions options) {
    if (config.kind != RecordKind::Curtailment) {
        raise(ErrorCode::ConfigError, "adapter is not a curtailment adapter");
    }
    const ReportedKind kind = descriptor.reported_kind;
    auto [records, report] = adapt_rows<CurtailmentRecord>(
        in, config, kind == ReportedKind::CapabilityAndOutput, options,
        [&](const std::string& id, Timestamp ts, const std::vector<std::string>& f, const ColumnMap& m,
            std::string& message) -> std::optional<CurtailmentRecord> {
            const std::string& v = f[m.value];
            double x = 0.0;
            switch (kind) {
            case ReportedKind::SystemCurtailedMW:
                if (!parse_number(v, x) || x < 0.0) {
                    message = "bad curtailed MW '" + v + "'";
                    return std::nullopt;
                }
                return CurtailmentRecord{id, ts, CurtailedMw{x}};
            case ReportedKind::PercentNodesMarginalFuel:
                if (!parse_number(v, x) || x < 0.0 || x > 100.0) {
                    message = "bad percent '" + v + "'";
                    return std::nullopt;
                }
                return CurtailmentRecord{id, ts, PercentNodes{x}};
            case ReportedKind::RegionalMarginalFuelFlag:
            case ReportedKind::SystemMarginalFuelFlag: {
                bool flag = false;
                if (!parse_flag_token(v, flag)) {
                    message = "bad flag '" + v + "'";
                    return std::nullopt;
                }
                return CurtailmentRecord{id, ts, MarginalFuelFlag{flag}};
            }
            case ReportedKind::CapabilityAndOutput: {
                double out = 0.0;
                if (!parse_number(v, x) || x < 0.0 || !parse_number(f[*m.output], out) || out < 0.0) {
                    message = "bad capability/output '" + v + "','" + f[*m.output] + "'";
                    return std::nullopt;
                }
                return CurtailmentRecord{id, ts, CapabilityOutput{x, out}};
            }
            }
            message = "unsupported reported kind";
            return std::nullopt;
        });
    return {std::move(records), std::move(report)};
}

} // namespace curtailkit
