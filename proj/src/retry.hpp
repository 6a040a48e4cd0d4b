#pragma once

#include <chrono>
#include <thread>

#include "paperchat/errors.hpp"

namespace paperchat::detail {

// Calls `fn` until it succeeds, a non-retriable Error escapes, or
// `attempts` are used up. Backoff doubles after each failure.
template <class Fn>
auto with_retries(int attempts, std::chrono::milliseconds backoff, Fn&& fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const Error& e) {
      if (!e.retriable() || attempt >= attempts) throw;
    }
    if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace paperchat::detail
