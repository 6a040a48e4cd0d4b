#include "paperchat/errors.hpp"

namespace paperchat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNormVector: return "ZeroNormVector";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::ContextOverflow: return "ContextOverflow";
    case ErrorCode::EmptyEvidence: return "EmptyEvidence";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::NoReferences: return "NoReferences";
    case ErrorCode::ScoreParseError: return "ScoreParseError";
    case ErrorCode::DocumentNotIngested: return "DocumentNotIngested";
    case ErrorCode::SummarizerUnavailable: return "SummarizerUnavailable";
    case ErrorCode::ParserUnavailable: return "ParserUnavailable";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace paperchat
