#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curtailkit {

enum class ErrorCode {
    InvalidArgument,
    // time series
    NonIntegerRatio,
    UpsampleRequested,
    ResolutionMismatch,
    EmptyOverlap,
    OffGrid,
    OutOfRange,
    BadBucket,
    UnknownZone,
    UnitMismatch,
    // ingest
    SchemaError,
    ErrorBudgetExceeded,
    DuplicateError,
    OffGridTimestamp,
    IoError,
    VersionError,
    FormatError,
    // detect
    GridMismatch,
    EmptySet,
    EmptyBins,
    TooFewBins,
    BadEdges,
    // forecast
    NoHistory,
    InsufficientHistory,
    AlreadyDiscrete,
    ScheduleOutOfRange,
    // evaluate
    WindowNotCovered,
    ActualGaps,
    CTooLarge,
    NoOverlap,
    EmptyInput,
    // cli
    MissingData,
    FlagOnlyIso,
    UnknownKind,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit path) can branch on the condition, not the text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

} // namespace curtailkit
