#pragma once

#include <stdexcept>
#include <string>

namespace hadamard {

/// Raised when an operation is called outside its preconditions
/// (mismatched spaces, parameters out of range, malformed requests).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a functional has no point with a finite value.
class PropernessError : public std::runtime_error {
 public:
  explicit PropernessError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hadamard
