#include "ecnav/error.hpp"

namespace ecnav {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kPackingFailure: return "PackingFailure";
    case ErrorKind::kDisconnected: return "Disconnected";
    case ErrorKind::kSpawnFailure: return "SpawnFailure";
    case ErrorKind::kNoPath: return "NoPath";
    case ErrorKind::kEmptyPlan: return "EmptyPlan";
    case ErrorKind::kNoCandidates: return "NoCandidates";
    case ErrorKind::kEmptyTrace: return "EmptyTrace";
    case ErrorKind::kBudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::kMissingVariable: return "MissingVariable";
    case ErrorKind::kNonFiniteParams: return "NonFiniteParams";
    case ErrorKind::kDivergence: return "Divergence";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kFormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace ecnav
