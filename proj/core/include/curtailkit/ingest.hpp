#pragma once

#include "curtailkit/time.hpp"
#include "curtailkit/timeseries.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace curtailkit {

enum class IsoId { SPP, CAISO, NYISO, PJM, MISO, ISONE, ERCOT, IESO };

/// What an ISO publishes as historical curtailment ground truth.
enum class ReportedKind {
    SystemCurtailedMW,
    PercentNodesMarginalFuel,
    RegionalMarginalFuelFlag,
    SystemMarginalFuelFlag,
    CapabilityAndOutput,
};

std::string_view to_string(IsoId iso) noexcept;
std::optional<IsoId> iso_from_string(std::string_view text) noexcept;
std::string_view to_string(ReportedKind kind) noexcept;
std::optional<ReportedKind> reported_kind_from_string(std::string_view text) noexcept;

/// Reported kinds that carry MW (directly or via capability minus output).
bool reports_mw(ReportedKind kind) noexcept;

struct IsoDescriptor {
    IsoId iso;
    Resolution granularity;
    ReportedKind reported_kind;
    std::string zone;
};

/// Published settlement granularity and reporting variant of each ISO, with
/// the zone its local clock runs on.
IsoDescriptor descriptor_for(IsoId iso);

/// Throws Error(InvalidArgument) if granularity or reported kind disagree
/// with the published table for that ISO.
void validate(const IsoDescriptor& descriptor);

/// Negative prices in MISO are often import-driven rather than curtailment.
bool has_import_price_caveat(IsoId iso) noexcept;

struct LmpRecord {
    std::string node_id;
    Timestamp timestamp;
    double price;

    bool operator==(const LmpRecord&) const = default;
};

struct CurtailedMw {
    double mw;
    bool operator==(const CurtailedMw&) const = default;
};
struct MarginalFuelFlag {
    bool value;
    bool operator==(const MarginalFuelFlag&) const = default;
};
struct PercentNodes {
    double percent;
    bool operator==(const PercentNodes&) const = default;
};
struct CapabilityOutput {
    double capability_mw;
    double output_mw;
    bool operator==(const CapabilityOutput&) const = default;
};

using CurtailmentPayload = std::variant<CurtailedMw, MarginalFuelFlag, PercentNodes, CapabilityOutput>;

struct CurtailmentRecord {
    std::string region_id;
    Timestamp timestamp;
    CurtailmentPayload payload;

    bool operator==(const CurtailmentRecord&) const = default;
};

/// Canonical `kind` column token for a reported kind: mw, pct, flag or cap_out.
std::string_view canonical_kind_token(ReportedKind kind) noexcept;

inline constexpr std::string_view kLmpHeader = "node_id,timestamp_utc,price_usd_per_mwh";
inline constexpr std::string_view kCurtailmentHeader = "region_id,timestamp_utc,kind,v1,v2";

struct RowError {
    std::size_t line;
    std::string message;
};

struct ParseOptions {
    /// Largest tolerated fraction of malformed data rows.
    double error_budget = 0.001;
    /// Prices with larger magnitude are rejected as row errors.
    double price_bound = 10000.0;
};

struct ParseReport {
    std::size_t rows = 0; ///< data rows seen, good and bad
    std::vector<RowError> errors;

    std::size_t good_rows() const noexcept { return rows - errors.size(); }
};

/// Throws Error(ErrorBudgetExceeded) if `report` exceeds the budget.
void enforce_error_budget(const ParseReport& report, const ParseOptions& options);

/// Streaming reader for the canonical LMP CSV. The header is checked on
/// construction (Error(SchemaError)); malformed rows are collected in
/// `report()` and skipped. Reaching the end of input enforces the error budget.
class LmpReader {
public:
    LmpReader(std::istream& in, IsoDescriptor descriptor, ParseOptions options = {});
    ~LmpReader();
    LmpReader(LmpReader&&) noexcept;
    LmpReader& operator=(LmpReader&&) noexcept;

    std::optional<LmpRecord> next();
    const ParseReport& report() const noexcept;
    const IsoDescriptor& descriptor() const noexcept;

private:
    struct State;
    std::unique_ptr<State> state_;
};

/// Streaming reader for the canonical curtailment CSV. Rows carry either the
/// full `region_id,timestamp_utc,kind,v1,v2` layout, or a compact layout that
/// omits `kind` and takes it from the descriptor (`region,ts,v1` or
/// `region,ts,capability,output`).
class CurtailmentReader {
public:
    CurtailmentReader(std::istream& in, IsoDescriptor descriptor, ParseOptions options = {});
    ~CurtailmentReader();
    CurtailmentReader(CurtailmentReader&&) noexcept;
    CurtailmentReader& operator=(CurtailmentReader&&) noexcept;

    std::optional<CurtailmentRecord> next();
    const ParseReport& report() const noexcept;
    const IsoDescriptor& descriptor() const noexcept;

private:
    struct State;
    std::unique_ptr<State> state_;
};

struct LmpParseResult {
    std::vector<LmpRecord> records;
    ParseReport report;
};

struct CurtailmentParseResult {
    std::vector<CurtailmentRecord> records;
    ParseReport report;
};

LmpParseResult parse_lmp(std::istream& in, const IsoDescriptor& descriptor, ParseOptions options = {});
CurtailmentParseResult parse_curtailment(std::istream& in, const IsoDescriptor& descriptor,
                                         ParseOptions options = {});
LmpParseResult parse_lmp_file(const std::filesystem::path& path, const IsoDescriptor& descriptor,
                              ParseOptions options = {});
CurtailmentParseResult parse_curtailment_file(const std::filesystem::path& path, const IsoDescriptor& descriptor,
                                              ParseOptions options = {});

struct DerivedCurtailment {
    double value;
    Unit unit; ///< Mw or Boolean01
};

/// MW where the ISO reports MW (capability minus output clamped at zero),
/// otherwise a 0/1 proxy: flags as-is, percent of nodes above
/// `percent_threshold` counts as true. Never negative.
DerivedCurtailment derive_curtailment_mw(const CurtailmentRecord& record, double percent_threshold = 0.0) noexcept;

/// Smallest grid (aligned to `resolution`) covering every timestamp, or
/// nullopt for no records.
std::optional<TimeGrid> covering_grid(std::span<const Timestamp> timestamps, Resolution resolution,
                                      std::string zone);
std::optional<TimeGrid> covering_grid(std::span<const LmpRecord> records, Resolution resolution, std::string zone);
std::optional<TimeGrid> covering_grid(std::span<const CurtailmentRecord> records, Resolution resolution,
                                      std::string zone);

/// One USD/MWh series per node. Records off the grid resolution raise
/// Error(OffGridTimestamp); records outside the grid range are ignored;
/// repeated (node, timestamp) pairs raise Error(DuplicateError).
SeriesSet to_series(std::span<const LmpRecord> records, const TimeGrid& grid);

/// One series per region, MW or boolean01 by reported kind.
SeriesSet to_series(std::span<const CurtailmentRecord> records, const TimeGrid& grid,
                    double percent_threshold = 0.0);

/// Writers for the canonical CSV files (LF endings, shortest round-trip
/// decimal form). Ids containing commas, quotes or line breaks are rejected.
void write_lmp_csv(std::ostream& out, std::span<const LmpRecord> records);
void write_curtailment_csv(std::ostream& out, std::span<const CurtailmentRecord> records);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace curtailkit
