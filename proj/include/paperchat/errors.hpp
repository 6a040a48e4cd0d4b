#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paperchat {

enum class ErrorCode {
  SchemaError,
  EmptyDocument,
  DimensionMismatch,
  ZeroNormVector,
  EmptyText,
  ProviderError,
  AuthError,
  ContextOverflow,
  EmptyEvidence,
  PreconditionViolation,
  NoReferences,
  ScoreParseError,
  DocumentNotIngested,
  SummarizerUnavailable,
  ParserUnavailable,
  NotFound,
  Conflict,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `retriable()` marks transient
/// provider/transport failures that the retry loops may repeat.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool retriable = false)
      : std::runtime_error(message), code_(code), retriable_(retriable) {}

  ErrorCode code() const noexcept { return code_; }
  bool retriable() const noexcept { return retriable_; }

 private:
  ErrorCode code_;
  bool retriable_;
};

}  // namespace paperchat
