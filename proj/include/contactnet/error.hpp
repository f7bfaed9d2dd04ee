#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace contactnet {

enum class ErrorCode {
  // ingestion
  DuplicateVertexId,
  DuplicateEdge,
  SelfLoop,
  DanglingEndpoint,
  MalformedRow,
  IoFailure,
  // analysis preconditions
  MissingCovariate,
  EmptyGraph,
  NoTriples,
  EmptyTail,
  DegenerateTail,
  AlphaOutOfRange,
  BadM,
  ZeroVariance,
  UnassignedVertex,
  DegenerateMatrix,
  EmptyObservation,
  TooFewEdges,
  CoincidentVertices,
  NotConnected,
  MissingPositions,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every recoverable failure in the library.
/// Ingestion errors carry a 1-based row: the file line for loaded tables, the
/// record number for graphs built in memory.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace contactnet
