#include "probstab/core.hpp"

namespace probstab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SignMismatch: return "SignMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BudgetTooLarge: return "BudgetTooLarge";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidDims: return "InvalidDims";
    case ErrorKind::NonpositiveC: return "NonpositiveC";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::UnsupportedFilter: return "UnsupportedFilter";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace probstab
