#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "contactnet/records.hpp"

namespace contactnet {

using VertexIndex = std::uint32_t;

/// Edge stored by vertex index; `src`/`dst` keep the orientation of the input record.
struct Edge {
  VertexIndex src{0};
  VertexIndex dst{0};
  NamedBy named_by{NamedBy::Unknown};
};

/// Immutable undirected simple graph with per-vertex covariates.
///
/// Vertices are indexed in input order. Adjacency lists are sorted by index.
/// Construction validates the simple-graph invariants and throws `Error` with
/// the offending 1-based record number in `row()`.
class ContactGraph {
 public:
  ContactGraph() = default;
  ContactGraph(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges,
               CovariateColumns columns = {});

  /// Vertices are created in order of first appearance, with no covariates.
  static ContactGraph from_edge_list(std::span<const std::pair<std::string, std::string>> edges);
  /// Vertices get zero-padded ids so lexicographic and index order agree.
  static ContactGraph from_index_edges(std::size_t n,
                                       std::span<const std::pair<VertexIndex, VertexIndex>> edges);

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const VertexRecord& vertex(VertexIndex v) const { return vertices_.at(v); }
  std::span<const VertexRecord> vertices() const noexcept { return vertices_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const VertexIndex> neighbors(VertexIndex v) const { return adjacency_.at(v); }
  std::size_t degree(VertexIndex v) const { return adjacency_.at(v).size(); }
  bool adjacent(VertexIndex u, VertexIndex v) const;

  std::optional<VertexIndex> find(std::string_view id) const;
  const CovariateColumns& columns() const noexcept { return columns_; }

  std::vector<EdgeRecord> edge_records() const;

 private:
  std::vector<VertexRecord> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<VertexIndex>> adjacency_;
  std::unordered_map<std::string, VertexIndex> index_;
  CovariateColumns columns_;
};

struct ComponentIndex {
  /// Component 0 is the largest; ties ordered by smallest member vertex id.
  std::vector<std::uint32_t> component_id;
  std::vector<std::size_t> sizes;  // descending
};

ComponentIndex connected_components(const ContactGraph& g);

/// Subgraph induced by `members` (any order); vertex order follows original indices.
ContactGraph induced_subgraph(const ContactGraph& g, std::span<const VertexIndex> members);

ContactGraph giant_component(const ContactGraph& g);

bool is_connected(const ContactGraph& g);

/// Hop distances from `source`; -1 for unreachable vertices.
/// When oriented, SRC edges run src->dst, DST edges dst->src, BOTH/U edges both ways.
std::vector<int> bfs_distances(const ContactGraph& g, VertexIndex source, bool oriented = false);

struct GeodesicSummary {
  std::size_t vertex_count{0};
  bool oriented{false};
  /// Sum over reachable ordered pairs (self-pairs included) divided by n(n+1).
  double mean_L{0.0};
  /// Same sum divided by n(n-1).
  double mean_L_conventional{0.0};
  double harmonic_mean{0.0};
  int diameter{0};
  std::uint64_t reachable_pairs{0};  // ordered, distinct
  std::map<int, std::uint64_t> histogram;  // distance -> ordered pair count, distance >= 1
};

GeodesicSummary geodesic_summary(const ContactGraph& g, bool oriented = false);

std::vector<VertexIndex> articulation_point_indices(const ContactGraph& g);
/// Sorted ids.
std::vector<std::string> articulation_points(const ContactGraph& g);

std::uint64_t triangle_count(const ContactGraph& g);
/// Global transitivity 3T / (connected triples).
double clustering_coefficient(const ContactGraph& g);

using Clique = std::vector<std::string>;
/// Every maximal clique (isolated vertices included as singletons); each clique
/// sorted, list ordered by size descending then lexicographically.
std::vector<Clique> maximal_cliques(const ContactGraph& g);

}  // namespace contactnet
