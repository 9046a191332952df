#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hurwitz {

enum class ErrorKind {
  DivisionByZero,
  ZeroScalar,
  ZeroParameter,
  AlgebraMismatch,
  NotInvertible,
  Singular,
  NotSimilitude,
  NotEuclidean,
  NotSymmetric,
  NotUnital,
  IsotropicIdentity,
  ImproperSimilitude,
  TrialityMismatch,
  TrialitySolverFailed,
  Distinct,
  SplitBinaryAlgebra,
  Dim1,
  NotComposition,
  NotRelated,
  NotInner,
  Degenerate,
  NotSpecialOrthogonal,
  WrongDimension,
  NotConjugate,
  InvalidArgument,
  ParseError,
  BackendMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::ZeroScalar: return "ZeroScalar";
    case ErrorKind::ZeroParameter: return "ZeroParameter";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotSimilitude: return "NotSimilitude";
    case ErrorKind::NotEuclidean: return "NotEuclidean";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::IsotropicIdentity: return "IsotropicIdentity";
    case ErrorKind::ImproperSimilitude: return "ImproperSimilitude";
    case ErrorKind::TrialityMismatch: return "TrialityMismatch";
    case ErrorKind::TrialitySolverFailed: return "TrialitySolverFailed";
    case ErrorKind::Distinct: return "Distinct";
    case ErrorKind::SplitBinaryAlgebra: return "SplitBinaryAlgebra";
    case ErrorKind::Dim1: return "Dim1";
    case ErrorKind::NotComposition: return "NotComposition";
    case ErrorKind::NotRelated: return "NotRelated";
    case ErrorKind::NotInner: return "NotInner";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotSpecialOrthogonal: return "NotSpecialOrthogonal";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::NotConjugate: return "NotConjugate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::BackendMismatch: return "BackendMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so that callers (the CLI
/// in particular) can tell negative mathematical verdicts from operational
/// errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hurwitz
