// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <stdexcept>
#include <string>

namespace names {

// Internal-invariant failure: a bug in this library, never a user error.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
[[noreturn]] inline void invariant_failed(const char* expr, const char* file,
                                          int line, const char* message) {
  throw InvariantError(std::string("invariant violated: ") + message + " (" +
                       expr + ") at " + file + ":" + std::to_string(line));
}
}  // namespace detail

// Always-on invariant check; unlike assert it survives release builds. Use
// for invariants whose violation means this library computed a wrong answer.
#define NAMES_CHECK(cond, message)                                      \
  do {                                                                  \
    if (!(cond)) {                                                      \
      ::names::detail::invariant_failed(#cond, __FILE__, __LINE__,      \
                                        message);                      \
    }                                                                   \
  } while (false)

}  // namespace names
