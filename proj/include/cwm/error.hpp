#pragma once

#include <stdexcept>
#include <string>

namespace cwm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: dimension mismatch, out-of-range parameter, unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical step could not be completed (degenerate trace, failed
/// eigendecomposition, state left the physical set).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cwm
