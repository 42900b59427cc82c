#pragma once

#include <stdexcept>
#include <string>

namespace glmg {

/// Raised when a computation would exceed a configured size cap (support
/// points, Hilbert-space dimension). Callers map this to a distinct exit code.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glmg
