#include "contactnet/error.hpp"

namespace contactnet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateVertexId: return "DuplicateVertexId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingCovariate: return "MissingCovariate";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoTriples: return "NoTriples";
    case ErrorCode::EmptyTail: return "EmptyTail";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::BadM: return "BadM";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UnassignedVertex: return "UnassignedVertex";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::EmptyObservation: return "EmptyObservation";
    case ErrorCode::TooFewEdges: return "TooFewEdges";
    case ErrorCode::CoincidentVertices: return "CoincidentVertices";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::MissingPositions: return "MissingPositions";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> row) {
  std::string out(to_string(code));
  if (row) out += " (row " + std::to_string(*row) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(decorate(code, message, row)), code_(code), row_(row) {}

}  // namespace contactnet
