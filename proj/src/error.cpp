#include "crm/error.hpp"

namespace crm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BlockCountMismatch: return "BlockCountMismatch";
    case ErrorKind::CollinearNoCircumcenter: return "CollinearNoCircumcenter";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::NotInSubspace: return "NotInSubspace";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::EmptyOperatorList: return "EmptyOperatorList";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::DiagnosticFailure: return "DiagnosticFailure";
    case ErrorKind::CannotExitSets: return "CannotExitSets";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace crm
