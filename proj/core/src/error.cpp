#include "curtailkit/error.hpp"

namespace curtailkit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonIntegerRatio: return "NonIntegerRatio";
    case ErrorCode::UpsampleRequested: return "UpsampleRequested";
    case ErrorCode::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::OffGrid: return "OffGrid";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadBucket: return "BadBucket";
    case ErrorCode::UnknownZone: return "UnknownZone";
    case ErrorCode::UnitMismatch: return "UnitMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ErrorBudgetExceeded: return "ErrorBudgetExceeded";
    case ErrorCode::DuplicateError: return "DuplicateError";
    case ErrorCode::OffGridTimestamp: return "OffGridTimestamp";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyBins: return "EmptyBins";
    case ErrorCode::TooFewBins: return "TooFewBins";
    case ErrorCode::BadEdges: return "BadEdges";
    case ErrorCode::NoHistory: return "NoHistory";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::AlreadyDiscrete: return "AlreadyDiscrete";
    case ErrorCode::ScheduleOutOfRange: return "ScheduleOutOfRange";
    case ErrorCode::WindowNotCovered: return "WindowNotCovered";
    case ErrorCode::ActualGaps: return "ActualGaps";
    case ErrorCode::CTooLarge: return "CTooLarge";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::FlagOnlyIso: return "FlagOnlyIso";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace curtailkit
