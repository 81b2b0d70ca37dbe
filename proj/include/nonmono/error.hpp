#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nonmono {

/// Raised for invalid input to any engine or loader. Carries a user-facing message.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline WarningHandler &warning_handler() {
  static WarningHandler h;
  return h;
}
} // namespace detail

/// Install a sink for non-fatal conditions (weight fallbacks, skipped records).
/// Set once before starting worker threads; the handler itself must be thread-safe.
inline void set_warning_handler(WarningHandler h) { detail::warning_handler() = std::move(h); }

inline void warn(std::string_view msg) {
  if (auto &h = detail::warning_handler()) h(msg);
}

} // namespace nonmono
