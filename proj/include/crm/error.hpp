#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crm {

enum class ErrorKind {
  DimensionMismatch,
  BlockCountMismatch,
  CollinearNoCircumcenter,
  InvalidWeight,
  InvalidArgument,
  RootNotBracketed,
  NotInSubspace,
  NotDiagonal,
  EmptyOperatorList,
  InsufficientHistory,
  DiagnosticFailure,
  CannotExitSets,
  EmptyGroup,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by solver diagnostics; carries the offending iteration.
class DiagnosticError : public Error {
 public:
  DiagnosticError(long iteration, const std::string& what)
      : Error(ErrorKind::DiagnosticFailure,
              "iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

inline void require_same_dimension(long a, long b, const char* context) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(context) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace crm
