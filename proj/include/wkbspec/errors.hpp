#pragma once

#include <stdexcept>
#include <string>

namespace wkbspec {

enum class ErrorKind {
  InvalidArgument,
  Domain,
  NoClassicalRegion,
  NoBoundState,
  StructureMismatch,
  QuadratureFailure,
  ConvergenceFailure,
  TurningPointProximity,
  Undersampled,
  DegenerateSample,
  DomainTooSmall,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::NoClassicalRegion: return "no classically allowed region";
    case ErrorKind::NoBoundState: return "no bound state";
    case ErrorKind::StructureMismatch: return "turning structure mismatch";
    case ErrorKind::QuadratureFailure: return "quadrature failure";
    case ErrorKind::ConvergenceFailure: return "convergence failure";
    case ErrorKind::TurningPointProximity: return "turning point proximity";
    case ErrorKind::Undersampled: return "undersampled";
    case ErrorKind::DegenerateSample: return "degenerate sample";
    case ErrorKind::DomainTooSmall: return "domain too small";
  }
  return "unknown error";
}

/// Base of every error raised by the library. `kind()` drives the CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define WKBSPEC_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                   \
   public:                                                                      \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {}    \
  };

WKBSPEC_DEFINE_ERROR(InvalidArgument)
WKBSPEC_DEFINE_ERROR(NoClassicalRegion)
WKBSPEC_DEFINE_ERROR(NoBoundState)
WKBSPEC_DEFINE_ERROR(StructureMismatch)
WKBSPEC_DEFINE_ERROR(QuadratureFailure)
WKBSPEC_DEFINE_ERROR(ConvergenceFailure)
WKBSPEC_DEFINE_ERROR(TurningPointProximity)
WKBSPEC_DEFINE_ERROR(Undersampled)
WKBSPEC_DEFINE_ERROR(DegenerateSample)
WKBSPEC_DEFINE_ERROR(DomainTooSmall)

#undef WKBSPEC_DEFINE_ERROR

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

}  // namespace wkbspec
