#pragma once

#include <stdexcept>
#include <string>

namespace afrelay {

enum class ErrorKind {
  kContractViolation,
  kDimension,
  kNumericalFailure,
  kSingular,
  kIdentifiability,
  kInfeasible,
  kValidation,
  kUnknownKey,
  kIo,
};

// Single exception type for the core; the C layer maps `kind()` onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace afrelay
