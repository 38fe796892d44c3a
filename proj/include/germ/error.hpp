#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace germ {

enum class Errc {
  CompositeP,
  ReducibleModulus,
  FieldTooLarge,
  DivisionByZero,
  IncompatibleFields,
  NoRootInField,
  ZeroToPrecision,
  NonUnitReciprocal,
  CompositionWithUnit,
  PadicObstruction,
  InsufficientPrecision,
  DegreeTooSmall,
  NotSuperattracting,
  UnassignedDependency,
  ShapeViolation,
  NotCoprime,
  UnsolvableRoot,
  PrecisionExhausted,
  SingularMatrix,
  DetDivisibleByP,
  ParseError,
  ValidationError,
  Internal,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::CompositeP: return "CompositeP";
    case Errc::ReducibleModulus: return "ReducibleModulus";
    case Errc::FieldTooLarge: return "FieldTooLarge";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::IncompatibleFields: return "IncompatibleFields";
    case Errc::NoRootInField: return "NoRootInField";
    case Errc::ZeroToPrecision: return "ZeroToPrecision";
    case Errc::NonUnitReciprocal: return "NonUnitReciprocal";
    case Errc::CompositionWithUnit: return "CompositionWithUnit";
    case Errc::PadicObstruction: return "PadicObstruction";
    case Errc::InsufficientPrecision: return "InsufficientPrecision";
    case Errc::DegreeTooSmall: return "DegreeTooSmall";
    case Errc::NotSuperattracting: return "NotSuperattracting";
    case Errc::UnassignedDependency: return "UnassignedDependency";
    case Errc::ShapeViolation: return "ShapeViolation";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::UnsolvableRoot: return "UnsolvableRoot";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::DetDivisibleByP: return "DetDivisibleByP";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace germ
