#pragma once

#include <stdexcept>
#include <string>

namespace closure {

/// Data failed an invariant check (manifest, predictions, configuration).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read, written or decoded.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace closure
