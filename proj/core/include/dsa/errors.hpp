#pragma once

#include <stdexcept>
#include <string>

namespace dsa {

/// Raised when an input file or experiment description is malformed.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a request exceeds a hard capacity limit (e.g. joint-chain size).
struct CapacityError : std::length_error {
  explicit CapacityError(const std::string& msg) : std::length_error(msg) {}
};

/// Raised when an iterative solver fails to reach its residual target.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dsa
