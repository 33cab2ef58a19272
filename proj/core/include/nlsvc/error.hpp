#pragma once

#include <stdexcept>
#include <string>

namespace nlsvc {

/// Violated precondition on a caller-supplied argument.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver a result (solver breakdown,
/// non-finite state, resolution failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace nlsvc
