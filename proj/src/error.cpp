#include "propertime/error.hpp"

namespace propertime {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonpositiveMass: return "NonpositiveMass";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::UnexpectedKernel: return "UnexpectedKernel";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ZeroProjection: return "ZeroProjection";
    case ErrorKind::BadInterval: return "BadInterval";
    case ErrorKind::Aliased: return "Aliased";
    case ErrorKind::ExpDiverged: return "ExpDiverged";
    case ErrorKind::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace propertime
