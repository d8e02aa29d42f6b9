#include "mvref/common.hpp"

namespace mvref {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::InsufficientViews: return "InsufficientViews";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::CenterAtInfinity: return "CenterAtInfinity";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::MissingObservation: return "MissingObservation";
    case ErrorKind::DegenerateMinors: return "DegenerateMinors";
    case ErrorKind::DegenerateSet: return "DegenerateSet";
    case ErrorKind::RankDeficientSystem: return "RankDeficientSystem";
    case ErrorKind::NoUsablePairs: return "NoUsablePairs";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

}  // namespace mvref
