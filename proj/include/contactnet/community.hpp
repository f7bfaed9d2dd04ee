#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contactnet/graph.hpp"
#include "contactnet/io.hpp"
#include "contactnet/mixing.hpp"

namespace contactnet::community {

/// Vertex-to-cluster assignment with clusters numbered 0..J-1 in order of their
/// smallest member vertex index.
struct Partition {
  std::vector<int> assignment;
  int clusters{0};
  double modularity{0.0};

  std::vector<std::vector<VertexIndex>> members() const;
};

inline constexpr int kDefaultRestarts = 8;

/// Connectivity-preserving multi-level greedy modularity clustering.
///
/// Each level greedily merges adjacent cluster pairs in decreasing order of
/// ΔQ = 2(m_ij - a_i a_j) while ΔQ > 0, every cluster merging at most once per
/// level, then coarsens to the quotient graph. Levels stop when no merge
/// improves Q. On the way back down every level is polished by single-node moves
/// to adjacent clusters that raise Q and keep the source cluster connected. The
/// seed permutes vertex order, which drives tie-breaking and move order.
/// Throws EmptyGraph when g has no edge.
Partition greedy_modularity(const ContactGraph& g, std::uint64_t seed);

/// Best of `restarts` runs with seeds derived from `seed`; ties keep the earliest run.
Partition best_of_restarts(const ContactGraph& g, std::uint64_t seed,
                           int restarts = kDefaultRestarts);

/// Canonical relabeling of an arbitrary assignment plus its modularity.
Partition make_partition(const ContactGraph& g, std::span<const int> assignment);

/// Modularity from exact integer edge counts.
double partition_modularity(const ContactGraph& g, std::span<const int> assignment);

/// True when every cluster induces a connected subgraph.
bool clusters_connected(const ContactGraph& g, std::span<const int> assignment);

struct ClusterNode {
  int cluster{0};
  std::size_t size{0};
  std::uint64_t internal_edges{0};
  std::array<std::size_t, kOrientationCount> orientation{};  // indexed by Orientation
};

struct ClusterLink {
  int a{0};  // a < b
  int b{0};
  std::uint64_t multiplicity{0};
};

struct ClusterGraph {
  std::vector<ClusterNode> nodes;
  std::vector<ClusterLink> links;  // sorted by (a, b)

  std::uint64_t inter_cluster_edges() const;
  std::uint64_t intra_cluster_edges() const;
};

ClusterGraph cluster_graph(const ContactGraph& g, const Partition& p);

/// Quotient graph with one vertex per cluster and one edge per link.
ContactGraph quotient_graph(const ClusterGraph& cg);

/// Module scale √(2m) below which modularity cannot resolve communities.
double resolution_limit(std::uint64_t edges);

struct SubclusterReport {
  int parent_cluster{0};
  std::size_t size{0};
  std::uint64_t edges{0};
  std::optional<Partition> subpartition;
  std::vector<double> null_samples;
  double null_mean{0.0};
  double null_max{0.0};
  bool significant{false};
  /// Fewer internal edges than the resolution limit of the parent graph.
  bool below_resolution{false};
  std::string note;
};

struct SubclusteringOptions {
  int null_replicates{100};
  int restarts{kDefaultRestarts};
  std::uint64_t seed{1};
};

/// One level of recursion: each cluster is re-clustered and compared with the
/// maximal modularity of degree-matched random graphs. Significant iff the
/// sub-clustering's Q exceeds the null maximum.
std::vector<SubclusterReport> recursive_subclustering(const ContactGraph& g, const Partition& p,
                                                      const SubclusteringOptions& options);

struct ClusterAtypicality {
  int cluster{0};
  std::size_t size{0};
  mixing::HomogeneityResult test;
  bool atypical{false};  // p < 0.05
  /// "typical", or for the orientation covariate "msm_group" / "mixed_group"
  /// (MSM share above / not above the reference share); "atypical" otherwise.
  std::string group;
  double msm_share{0.0};
};

struct AtypicalityReport {
  mixing::Covariate covariate{mixing::Covariate::Orientation};
  std::vector<std::string> categories;
  std::vector<double> reference;
  double reference_msm_share{0.0};
  std::vector<ClusterAtypicality> clusters;
  std::size_t atypical_clusters{0};
  std::size_t msm_group_clusters{0};
  std::size_t msm_group_persons{0};
  std::size_t mixed_group_clusters{0};
  std::size_t mixed_group_persons{0};
  /// Edges joining a member of an MSM-group cluster to a member of a mixed-group cluster.
  std::uint64_t inter_group_edges{0};
};

inline constexpr double kAtypicalityLevel = 0.05;

/// Per-cluster χ² homogeneity of `covariate` against its distribution over g.
AtypicalityReport atypicality_report(const ContactGraph& g, const Partition& p,
                                     mixing::Covariate covariate, std::uint64_t seed = 0);

io::CsvTable partition_csv(const ContactGraph& g, const Partition& p);
io::CsvTable cluster_nodes_csv(const ClusterGraph& cg);
io::CsvTable cluster_links_csv(const ClusterGraph& cg);

}  // namespace contactnet::community
