#pragma once

#include <stdexcept>
#include <string>

namespace cpa {

/// Invalid input or configuration. The CLI maps this to exit code 2.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence, unitarity violation, degenerate fit.
/// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cpa
