#include "curtailkit/ingest.hpp"

#include "curtailkit/error.hpp"
#include "line_reader.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_map>

namespace curtailkit {

std::string_view to_string(IsoId iso) noexcept {
    switch (iso) {
    case IsoId::SPP: return "SPP";
    case IsoId::CAISO: return "CAISO";
    case IsoId::NYISO: return "NYISO";
    case IsoId::PJM: return "PJM";
    case IsoId::MISO: return "MISO";
    case IsoId::ISONE: return "ISONE";
    case IsoId::ERCOT: return "ERCOT";
    case IsoId::IESO: return "IESO";
    }
    return "unknown";
}

std::optional<IsoId> iso_from_string(std::string_view text) noexcept {
    for (IsoId iso : {IsoId::SPP, IsoId::CAISO, IsoId::NYISO, IsoId::PJM, IsoId::MISO, IsoId::ISONE, IsoId::ERCOT,
                      IsoId::IESO}) {
        const std::string_view name = to_string(iso);
        if (name.size() == text.size() &&
            std::equal(name.begin(), name.end(), text.begin(), [](char a, char b) {
                return a == (b >= 'a' && b <= 'z' ? static_cast<char>(b - 'a' + 'A') : b);
            })) {
            return iso;
        }
    }
    return std::nullopt;
}

std::string_view to_string(ReportedKind kind) noexcept {
    switch (kind) {
    case ReportedKind::SystemCurtailedMW: return "SystemCurtailedMW";
    case ReportedKind::PercentNodesMarginalFuel: return "PercentNodesMarginalFuel";
    case ReportedKind::RegionalMarginalFuelFlag: return "RegionalMarginalFuelFlag";
    case ReportedKind::SystemMarginalFuelFlag: return "SystemMarginalFuelFlag";
    case ReportedKind::CapabilityAndOutput: return "CapabilityAndOutput";
    }
    return "unknown";
}

std::optional<ReportedKind> reported_kind_from_string(std::string_view text) noexcept {
    for (ReportedKind k : {ReportedKind::SystemCurtailedMW, ReportedKind::PercentNodesMarginalFuel,
                           ReportedKind::RegionalMarginalFuelFlag, ReportedKind::SystemMarginalFuelFlag,
                           ReportedKind::CapabilityAndOutput}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

bool reports_mw(ReportedKind kind) noexcept {
    return kind == ReportedKind::SystemCurtailedMW || kind == ReportedKind::CapabilityAndOutput;
}

IsoDescriptor descriptor_for(IsoId iso) {
    const Resolution five = Resolution::five_minute();
    const Resolution hour = Resolution::hourly();
    switch (iso) {
    case IsoId::SPP: return {iso, five, ReportedKind::SystemCurtailedMW, "America/Chicago"};
    case IsoId::CAISO: return {iso, five, ReportedKind::SystemCurtailedMW, "America/Los_Angeles"};
    case IsoId::NYISO: return {iso, hour, ReportedKind::SystemCurtailedMW, "America/New_York"};
    case IsoId::PJM: return {iso, hour, ReportedKind::PercentNodesMarginalFuel, "America/New_York"};
    case IsoId::MISO: return {iso, hour, ReportedKind::RegionalMarginalFuelFlag, "America/Chicago"};
    case IsoId::ISONE: return {iso, hour, ReportedKind::SystemMarginalFuelFlag, "America/New_York"};
    case IsoId::ERCOT: return {iso, five, ReportedKind::CapabilityAndOutput, "America/Chicago"};
    case IsoId::IESO: return {iso, hour, ReportedKind::CapabilityAndOutput, "America/Toronto"};
    }
    raise(ErrorCode::InvalidArgument, "unknown ISO");
}

void validate(const IsoDescriptor& d) {
    const IsoDescriptor expected = descriptor_for(d.iso);
    if (d.granularity != expected.granularity) {
        raise(ErrorCode::InvalidArgument, std::string(to_string(d.iso)) + " publishes " +
                                              std::to_string(expected.granularity.seconds()) + "s data, not " +
                                              std::to_string(d.granularity.seconds()) + "s");
    }
    if (d.reported_kind != expected.reported_kind) {
        raise(ErrorCode::InvalidArgument, std::string(to_string(d.iso)) + " reports " +
                                              std::string(to_string(expected.reported_kind)) + ", not " +
                                              std::string(to_string(d.reported_kind)));
    }
    if (d.zone.empty()) {
        raise(ErrorCode::InvalidArgument, "descriptor zone is empty");
    }
}

bool has_import_price_caveat(IsoId iso) noexcept {
    return iso == IsoId::MISO;
}

std::string_view canonical_kind_token(ReportedKind kind) noexcept {
    switch (kind) {
    case ReportedKind::SystemCurtailedMW: return "mw";
    case ReportedKind::PercentNodesMarginalFuel: return "pct";
    case ReportedKind::RegionalMarginalFuelFlag:
    case ReportedKind::SystemMarginalFuelFlag: return "flag";
    case ReportedKind::CapabilityAndOutput: return "cap_out";
    }
    return "";
}

void enforce_error_budget(const ParseReport& report, const ParseOptions& options) {
    const auto allowed = static_cast<std::size_t>(std::floor(options.error_budget * static_cast<double>(report.rows)));
    if (report.errors.size() > allowed) {
        std::string msg = std::to_string(report.errors.size()) + " malformed rows out of " +
                          std::to_string(report.rows) + " exceed the error budget";
        if (!report.errors.empty()) {
            msg += " (first at line " + std::to_string(report.errors.front().line) + ": " +
                   report.errors.front().message + ")";
        }
        raise(ErrorCode::ErrorBudgetExceeded, msg);
    }
}

namespace {

constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

void read_header(detail::LineReader& reader, std::string_view expected) {
    std::string_view header;
    if (!reader.next(header)) {
        raise(ErrorCode::SchemaError, "missing header, expected '" + std::string(expected) + "'");
    }
    if (header.substr(0, kUtf8Bom.size()) == kUtf8Bom) {
        header.remove_prefix(kUtf8Bom.size());
    }
    if (header != expected) {
        raise(ErrorCode::SchemaError,
              "header '" + std::string(header) + "' does not match '" + std::string(expected) + "'");
    }
}

bool parse_flag(std::string_view text, bool& out) noexcept {
    auto eq = [&](std::string_view word) {
        return text.size() == word.size() && std::equal(text.begin(), text.end(), word.begin(), [](char a, char b) {
                   return (a >= 'A' && a <= 'Z' ? static_cast<char>(a - 'A' + 'a') : a) == b;
               });
    };
    if (text == "1" || eq("true")) {
        out = true;
        return true;
    }
    if (text == "0" || eq("false")) {
        out = false;
        return true;
    }
    return false;
}

bool parse_non_negative(std::string_view text, double& out) noexcept {
    return detail::parse_double(text, out) && std::isfinite(out) && out >= 0.0;
}

} // namespace

struct LmpReader::State {
    State(std::istream& in, IsoDescriptor d, ParseOptions o) : reader(in), descriptor(std::move(d)), options(o) {}

    detail::LineReader reader;
    IsoDescriptor descriptor;
    ParseOptions options;
    ParseReport report;
    bool finished = false;
};

LmpReader::LmpReader(std::istream& in, IsoDescriptor descriptor, ParseOptions options)
    : state_(std::make_unique<State>(in, std::move(descriptor), options)) {
    read_header(state_->reader, kLmpHeader);
}

LmpReader::~LmpReader() = default;
LmpReader::LmpReader(LmpReader&&) noexcept = default;
LmpReader& LmpReader::operator=(LmpReader&&) noexcept = default;

const ParseReport& LmpReader::report() const noexcept {
    return state_->report;
}

const IsoDescriptor& LmpReader::descriptor() const noexcept {
    return state_->descriptor;
}

std::optional<LmpRecord> LmpReader::next() {
    State& s = *state_;
    if (s.finished) {
        return std::nullopt;
    }
    std::string_view line;
    std::array<std::string_view, 3> fields;
    while (s.reader.next(line)) {
        if (line.empty()) {
            continue;
        }
        ++s.report.rows;
        const std::size_t line_no = s.reader.line_number();
        auto fail = [&](std::string message) { s.report.errors.push_back({line_no, std::move(message)}); };

        if (detail::split_plain(line, ',', fields.data(), fields.size()) != fields.size()) {
            fail("expected 3 fields");
            continue;
        }
        if (fields[0].empty()) {
            fail("empty node_id");
            continue;
        }
        const auto ts = parse_rfc3339(fields[1]);
        if (!ts) {
            fail("bad timestamp '" + std::string(fields[1]) + "'");
            continue;
        }
        double price = 0.0;
        if (!detail::parse_double(fields[2], price) || !std::isfinite(price)) {
            fail("bad price '" + std::string(fields[2]) + "'");
            continue;
        }
        if (std::abs(price) > s.options.price_bound) {
            fail("price " + std::string(fields[2]) + " exceeds sanity bound");
            continue;
        }
        return LmpRecord{std::string(fields[0]), *ts, price};
    }
    s.finished = true;
    enforce_error_budget(s.report, s.options);
    return std::nullopt;
}

struct CurtailmentReader::State {
    State(std::istream& in, IsoDescriptor d, ParseOptions o) : reader(in), descriptor(std::move(d)), options(o) {}

    detail::LineReader reader;
    IsoDescriptor descriptor;
    ParseOptions options;
    ParseReport report;
    bool finished = false;
};

CurtailmentReader::CurtailmentReader(std::istream& in, IsoDescriptor descriptor, ParseOptions options)
    : state_(std::make_unique<State>(in, std::move(descriptor), options)) {
    read_header(state_->reader, kCurtailmentHeader);
}

CurtailmentReader::~CurtailmentReader() = default;
CurtailmentReader::CurtailmentReader(CurtailmentReader&&) noexcept = default;
CurtailmentReader& CurtailmentReader::operator=(CurtailmentReader&&) noexcept = default;

const ParseReport& CurtailmentReader::report() const noexcept {
    return state_->report;
}

const IsoDescriptor& CurtailmentReader::descriptor() const noexcept {
    return state_->descriptor;
}

std::optional<CurtailmentRecord> CurtailmentReader::next() {
    State& s = *state_;
    if (s.finished) {
        return std::nullopt;
    }
    const ReportedKind kind = s.descriptor.reported_kind;
    const std::string_view token = canonical_kind_token(kind);
    std::string_view line;
    std::array<std::string_view, 5> fields;
    while (s.reader.next(line)) {
        if (line.empty()) {
            continue;
        }
        ++s.report.rows;
        const std::size_t line_no = s.reader.line_number();
        auto fail = [&](std::string message) { s.report.errors.push_back({line_no, std::move(message)}); };

        const std::size_t n = detail::split_plain(line, ',', fields.data(), fields.size());
        std::string_view v1;
        std::string_view v2;
        if (n == 5) {
            if (fields[2] != token) {
                fail("kind '" + std::string(fields[2]) + "' does not match " + std::string(to_string(kind)));
                continue;
            }
            v1 = fields[3];
            v2 = fields[4];
            if (kind != ReportedKind::CapabilityAndOutput && !v2.empty()) {
                fail("v2 is only used for cap_out rows");
                continue;
            }
        } else if (n == 3 && kind != ReportedKind::CapabilityAndOutput) {
            v1 = fields[2];
        } else if (n == 4 && kind == ReportedKind::CapabilityAndOutput) {
            v1 = fields[2];
            v2 = fields[3];
        } else {
            fail("unexpected field count " + std::to_string(n));
            continue;
        }
        if (fields[0].empty()) {
            fail("empty region_id");
            continue;
        }
        const auto ts = parse_rfc3339(fields[1]);
        if (!ts) {
            fail("bad timestamp '" + std::string(fields[1]) + "'");
            continue;
        }

        CurtailmentPayload payload;
        switch (kind) {
        case ReportedKind::SystemCurtailedMW: {
            double mw = 0.0;
            if (!parse_non_negative(v1, mw)) {
                fail("bad curtailed MW '" + std::string(v1) + "'");
                continue;
            }
            payload = CurtailedMw{mw};
            break;
        }
        case ReportedKind::PercentNodesMarginalFuel: {
            double pct = 0.0;
            if (!parse_non_negative(v1, pct) || pct > 100.0) {
                fail("bad percent '" + std::string(v1) + "'");
                continue;
            }
            payload = PercentNodes{pct};
            break;
        }
        case ReportedKind::RegionalMarginalFuelFlag:
        case ReportedKind::SystemMarginalFuelFlag: {
            bool flag = false;
            if (!parse_flag(v1, flag)) {
                fail("bad flag '" + std::string(v1) + "'");
                continue;
            }
            payload = MarginalFuelFlag{flag};
            break;
        }
        case ReportedKind::CapabilityAndOutput: {
            double cap = 0.0;
            double out = 0.0;
            if (!parse_non_negative(v1, cap) || !parse_non_negative(v2, out)) {
                fail("bad capability/output '" + std::string(v1) + "," + std::string(v2) + "'");
                continue;
            }
            payload = CapabilityOutput{cap, out};
            break;
        }
        }
        return CurtailmentRecord{std::string(fields[0]), *ts, payload};
    }
    s.finished = true;
    enforce_error_budget(s.report, s.options);
    return std::nullopt;
}

LmpParseResult parse_lmp(std::istream& in, const IsoDescriptor& descriptor, ParseOptions options) {
    LmpReader reader(in, descriptor, options);
    LmpParseResult result;
    while (auto record = reader.next()) {
        result.records.push_back(std::move(*record));
    }
    result.report = reader.report();
    return result;
}

CurtailmentParseResult parse_curtailment(std::istream& in, const IsoDescriptor& descriptor, ParseOptions options) {
    CurtailmentReader reader(in, descriptor, options);
    CurtailmentParseResult result;
    while (auto record = reader.next()) {
        result.records.push_back(std::move(*record));
    }
    result.report = reader.report();
    return result;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    return in;
}

} // namespace

LmpParseResult parse_lmp_file(const std::filesystem::path& path, const IsoDescriptor& descriptor,
                              ParseOptions options) {
    auto in = open_input(path);
    return parse_lmp(in, descriptor, options);
}

CurtailmentParseResult parse_curtailment_file(const std::filesystem::path& path, const IsoDescriptor& descriptor,
                                              ParseOptions options) {
    auto in = open_input(path);
    return parse_curtailment(in, descriptor, options);
}

DerivedCurtailment derive_curtailment_mw(const CurtailmentRecord& record, double percent_threshold) noexcept {
    struct Visitor {
        double percent_threshold;
        DerivedCurtailment operator()(const CurtailedMw& p) const { return {std::max(0.0, p.mw), Unit::Mw}; }
        DerivedCurtailment operator()(const CapabilityOutput& p) const {
            return {std::max(0.0, p.capability_mw - p.output_mw), Unit::Mw};
        }
        DerivedCurtailment operator()(const MarginalFuelFlag& p) const {
            return {p.value ? 1.0 : 0.0, Unit::Boolean01};
        }
        DerivedCurtailment operator()(const PercentNodes& p) const {
            return {p.percent > percent_threshold ? 1.0 : 0.0, Unit::Boolean01};
        }
    };
    return std::visit(Visitor{percent_threshold}, record.payload);
}

std::optional<TimeGrid> covering_grid(std::span<const Timestamp> timestamps, Resolution resolution,
                                      std::string zone) {
    if (timestamps.empty()) {
        return std::nullopt;
    }
    const auto [lo, hi] = std::minmax_element(timestamps.begin(), timestamps.end());
    const std::int64_t res = resolution.seconds();
    const std::int64_t start = floor_div(lo->time_since_epoch().count(), res) * res;
    const std::int64_t last = floor_div(hi->time_since_epoch().count(), res) * res;
    return TimeGrid(Timestamp{Seconds{start}}, static_cast<std::size_t>((last - start) / res + 1), resolution,
                    std::move(zone));
}

namespace {

template <class Record>
std::optional<TimeGrid> covering_grid_of(std::span<const Record> records, Resolution resolution, std::string zone) {
    if (records.empty()) {
        return std::nullopt;
    }
    Timestamp lo = records.front().timestamp;
    Timestamp hi = lo;
    for (const auto& r : records) {
        lo = std::min(lo, r.timestamp);
        hi = std::max(hi, r.timestamp);
    }
    const std::array<Timestamp, 2> ends{lo, hi};
    return covering_grid(ends, resolution, std::move(zone));
}

/// Scatters (id, timestamp, value) triples onto per-id columns of `grid`.
class SeriesBuilder {
public:
    explicit SeriesBuilder(const TimeGrid& grid) : grid_(grid) {}

    void add(const std::string& id, Timestamp t, double value, Unit unit) {
        if (!grid_.is_on_grid(t)) {
            raise(ErrorCode::OffGridTimestamp,
                  id + " at " + format_rfc3339(t) + " is not aligned to the " +
                      std::to_string(grid_.resolution().seconds()) + "s grid");
        }
        const auto index = grid_.index_of(t);
        if (!index) {
            return;
        }
        auto it = lookup_.find(id);
        if (it == lookup_.end()) {
            it = lookup_.emplace(id, columns_.size()).first;
            columns_.push_back(Column{id, unit, std::vector<Series::value_type>(grid_.length())});
        }
        Column& column = columns_[it->second];
        if (column.unit != unit) {
            raise(ErrorCode::UnitMismatch, id + " mixes " + std::string(to_string(column.unit)) + " and " +
                                               std::string(to_string(unit)) + " values");
        }
        auto& slot = column.values[*index];
        if (slot) {
            raise(ErrorCode::DuplicateError, "duplicate row for " + id + " at " + format_rfc3339(t));
        }
        slot = value;
    }

    SeriesSet finish() && {
        SeriesSet out;
        for (auto& c : columns_) {
            out.emplace(std::move(c.id), Series(grid_, std::move(c.values), c.unit));
        }
        return out;
    }

private:
    struct Column {
        std::string id;
        Unit unit;
        std::vector<Series::value_type> values;
    };

    const TimeGrid& grid_;
    std::unordered_map<std::string, std::size_t> lookup_;
    std::vector<Column> columns_;
};

} // namespace

std::optional<TimeGrid> covering_grid(std::span<const LmpRecord> records, Resolution resolution, std::string zone) {
    return covering_grid_of(records, resolution, std::move(zone));
}

std::optional<TimeGrid> covering_grid(std::span<const CurtailmentRecord> records, Resolution resolution,
                                      std::string zone) {
    return covering_grid_of(records, resolution, std::move(zone));
}

SeriesSet to_series(std::span<const LmpRecord> records, const TimeGrid& grid) {
    SeriesBuilder builder(grid);
    for (const auto& r : records) {
        builder.add(r.node_id, r.timestamp, r.price, Unit::UsdPerMwh);
    }
    return std::move(builder).finish();
}

SeriesSet to_series(std::span<const CurtailmentRecord> records, const TimeGrid& grid, double percent_threshold) {
    SeriesBuilder builder(grid);
    for (const auto& r : records) {
        const DerivedCurtailment d = derive_curtailment_mw(r, percent_threshold);
        builder.add(r.region_id, r.timestamp, d.value, d.unit);
    }
    return std::move(builder).finish();
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        raise(ErrorCode::InvalidArgument, "cannot format number");
    }
    return std::string(buf.data(), ptr);
}

namespace {

void check_id(const std::string& id) {
    if (id.empty() || id.find_first_of(",\"\r\n") != std::string::npos) {
        raise(ErrorCode::InvalidArgument, "id '" + id + "' cannot be written to canonical CSV");
    }
}

} // namespace

void write_lmp_csv(std::ostream& out, std::span<const LmpRecord> records) {
    out << kLmpHeader << '\n';
    for (const auto& r : records) {
        check_id(r.node_id);
        out << r.node_id << ',' << format_rfc3339(r.timestamp) << ',' << format_double(r.price) << '\n';
    }
}

void write_curtailment_csv(std::ostream& out, std::span<const CurtailmentRecord> records) {
    out << kCurtailmentHeader << '\n';
    for (const auto& r : records) {
        check_id(r.region_id);
        out << r.region_id << ',' << format_rfc3339(r.timestamp) << ',';
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, CurtailedMw>) {
                    out << "mw," << format_double(p.mw) << ',';
                } else if constexpr (std::is_same_v<T, MarginalFuelFlag>) {
                    out << "flag," << (p.value ? "true" : "false") << ',';
                } else if constexpr (std::is_same_v<T, PercentNodes>) {
                    out << "pct," << format_double(p.percent) << ',';
                } else {
                    out << "cap_out," << format_double(p.capability_mw) << ',' << format_double(p.output_mw);
                }
            },
            r.payload);
        out << '\n';
    }
}

} // namespace curtailkit
