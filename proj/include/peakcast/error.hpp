#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace peakcast {

enum class ErrorCode {
  MalformedRow,
  GapError,
  DomainError,
  ConfigError,
  BoundaryError,
  DegenerateChannel,
  TooShort,
  DimensionMismatch,
  ShapeMismatch,
  LengthMismatch,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  RangeError,
  EmptyDataset,
  EmptyCandidates,
  KOutOfRange,
  NonPositiveActual,
  CardinalityMismatch,
  SingularSystem,
  MissingHistory,
  SocOutOfRange,
  IncompleteMonth,
  NoSavings,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::GapError: return "GapError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BoundaryError: return "BoundaryError";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::NonPositiveActual: return "NonPositiveActual";
    case ErrorCode::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MissingHistory: return "MissingHistory";
    case ErrorCode::SocOutOfRange: return "SocOutOfRange";
    case ErrorCode::IncompleteMonth: return "IncompleteMonth";
    case ErrorCode::NoSavings: return "NoSavings";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace peakcast
