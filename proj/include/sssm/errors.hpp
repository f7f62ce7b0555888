#pragma once

#include <stdexcept>
#include <string>

namespace sssm {

// Malformed run configuration or CLI usage. Mapped to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Corrupt, truncated or version-mismatched serialized data.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite math is required (training divergence).
// Mapped to exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds a documented resource bound (e.g. oracle tape length).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sssm
