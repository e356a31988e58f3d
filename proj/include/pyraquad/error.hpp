#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pyraquad {

enum class ErrorKind {
  DegenerateFace,
  AssumptionViolated,
  DegenerateHull,
  AssumptionPSViolated,
  BadConformity,
  InvalidExponent,
  DomainError,
  ParseError,
  ValidationError,
  DimensionMismatch,
  IntegrabilityViolated,
  DegenerateBase,
  NonFiniteValue,
  BudgetExceeded,
  UnknownKernel,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateFace: return "DegenerateFace";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::DegenerateHull: return "DegenerateHull";
    case ErrorKind::AssumptionPSViolated: return "AssumptionPSViolated";
    case ErrorKind::BadConformity: return "BadConformity";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IntegrabilityViolated: return "IntegrabilityViolated";
    case ErrorKind::DegenerateBase: return "DegenerateBase";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnknownKernel: return "UnknownKernel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every library failure is reported with one of these; `kind()` is the
/// machine-readable category the CLI forwards in its error JSON.
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

}  // namespace pyraquad
