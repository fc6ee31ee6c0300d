#include "cnix/error.hpp"

namespace cnix {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMissingIdentity: return "MissingIdentity";
    case ErrorCode::kEmptyName: return "EmptyName";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kSourceUnreadable: return "SourceUnreadable";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidAbbreviationTable: return "InvalidAbbreviationTable";
    case ErrorCode::kCorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBenchMismatch: return "BenchMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace cnix
