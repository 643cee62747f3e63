#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bergman {

enum class ErrorKind {
  VariableMismatch,
  BadVariable,
  NonzeroConstantTerm,
  ZeroConstantTerm,
  NotRealValued,
  Degenerate,
  GapViolation,
  DegenerateHessian,
  CriticalStructureViolation,
  BadContour,
  InsufficientDegree,
  QuadratureUnderresolved,
  DegenerateFit,
  IllConditioned,
  ConfigInvalid,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` is the
// machine-readable part, `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::VariableMismatch: return "VariableMismatch";
    case ErrorKind::BadVariable: return "BadVariable";
    case ErrorKind::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorKind::ZeroConstantTerm: return "ZeroConstantTerm";
    case ErrorKind::NotRealValued: return "NotRealValued";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::GapViolation: return "GapViolation";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::CriticalStructureViolation: return "CriticalStructureViolation";
    case ErrorKind::BadContour: return "BadContour";
    case ErrorKind::InsufficientDegree: return "InsufficientDegree";
    case ErrorKind::QuadratureUnderresolved: return "QuadratureUnderresolved";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bergman
