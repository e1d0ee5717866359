#pragma once

#include <stdexcept>
#include <string>

namespace qrelay {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  TraceNotOne,
  DimMismatch,
  BadSubsystemIndex,
  AlphabetMismatch,
  InvalidDistribution,
  InvalidConfig,
  SizeCap,
  PreconditionViolated,
  InequalityViolated,
  IncompleteTable,
  ParseError,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library. `value` carries the offending
// number when there is one (trace, most-negative eigenvalue, margin, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

}  // namespace qrelay
