#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bellmix {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  NonHermitianInput,
  InvalidState,
  ZeroTrace,
  NotNormalized,
  OutOfRange,
  IndexOutOfRange,
  DegenerateDenominator,
  MismatchedData,
  NoCounts,
  ParseError,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bellmix
