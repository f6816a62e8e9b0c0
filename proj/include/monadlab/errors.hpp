#pragma once

#include <stdexcept>
#include <string>

namespace monadlab {

/// Raised when a computation would leave the configured arity bound or a
/// precondition of a construction does not hold. Checkers catch it and count
/// the instance as untested; the CLI maps it to exit code 2.
struct Refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace monadlab
