#pragma once

#include <stdexcept>
#include <string>

namespace synthsusp {

enum class ErrorCode {
  IoFailure,
  MalformedHeader,
  PayloadMismatch,
  NonFiniteValue,
  InvalidArgument,
  MissingCenter,
  EmptyMask,
  EmptyCollection,
  MalformedMask,
  Unclassifiable,
  Unsolvable,
  ShapeMismatch,
  Timeout,
  NoValidPixel,
};

/// Library-wide exception carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace synthsusp
