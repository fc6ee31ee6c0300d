#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnix {

enum class ErrorCode {
  kMissingIdentity,
  kEmptyName,
  kEmptyQuery,
  kDuplicateKey,
  kUnknownKey,
  kSourceUnreadable,
  kMalformedRow,
  kInvalidParams,
  kInvalidConfig,
  kInvalidAbbreviationTable,
  kCorruptSnapshot,
  kIoFailure,
  kBenchMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the codes above; the
// message names the offending input (path, line, key).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cnix
