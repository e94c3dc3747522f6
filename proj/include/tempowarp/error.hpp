#pragma once

#include <stdexcept>
#include <string>

namespace tempowarp {

enum class ErrorKind {
  InvalidInput,
  ConventionViolation,
  DegenerateConfiguration,
  SingularSystem,
  Domain,
  InsufficientData,
  EmptyBank,
  DegenerateMask,
  UndefinedMetric,
  NumericalFailure,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) [[unlikely]] throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) [[unlikely]] throw Error(kind, what);
}

}  // namespace tempowarp
