#pragma once

#include <stdexcept>
#include <string>

namespace robustlm {

/// Input data failed a structural or numeric precondition.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A file could not be parsed; the message carries the offending location.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested operation is undefined for the given penalty kind.
class UnsupportedOperation : public std::runtime_error {
 public:
  explicit UnsupportedOperation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robustlm
