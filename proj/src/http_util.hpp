#pragma once

#include <string>

#include "httplib.h"
#include "paperchat/errors.hpp"

namespace paperchat::detail {

// Maps a provider HTTP outcome onto the error taxonomy: transport failures,
// 429 and 5xx are retriable, 401/403 are auth failures.
inline void check_provider_response(const httplib::Result& res, const std::string& what) {
  if (!res) {
    throw Error(ErrorCode::ProviderError, what + ": transport error " + httplib::to_string(res.error()),
                /*retriable=*/true);
  }
  const int status = res->status;
  if (status >= 200 && status < 300) return;
  if (status == 401 || status == 403) {
    throw Error(ErrorCode::AuthError, what + ": authentication failed (HTTP " + std::to_string(status) + ")");
  }
  const bool retriable = status == 429 || status >= 500;
  throw Error(ErrorCode::ProviderError, what + ": HTTP " + std::to_string(status) + " " + res->body.substr(0, 200),
              retriable);
}

inline httplib::Headers bearer(const std::string& api_key) {
  return {{"Authorization", "Bearer " + api_key}};
}

}  // namespace paperchat::detail
