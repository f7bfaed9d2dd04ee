#include "contactnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <numeric>
#include <tuple>

#include "contactnet/error.hpp"
#include "contactnet/nullmodel.hpp"
#include "contactnet/numeric.hpp"

namespace contactnet::community {

namespace {

using Weight = std::int64_t;
using NodeId = std::uint32_t;

// Weighted graph of one coarsening level. Gains are scaled by 2m² so that every
// comparison is exact integer arithmetic.
struct LevelGraph {
  std::vector<Weight> self;    // edges inside the node
  std::vector<Weight> degree;  // sum of member degrees
  std::vector<std::vector<std::pair<NodeId, Weight>>> adj;

  std::size_t size() const { return degree.size(); }
};

LevelGraph base_level(const ContactGraph& g, const std::vector<NodeId>& position) {
  const std::size_t n = g.vertex_count();
  LevelGraph lg;
  lg.self.assign(n, 0);
  lg.degree.assign(n, 0);
  lg.adj.resize(n);
  for (VertexIndex v = 0; v < n; ++v) {
    const NodeId x = position[v];
    lg.degree[x] = static_cast<Weight>(g.degree(v));
    for (VertexIndex w : g.neighbors(v)) lg.adj[x].emplace_back(position[w], 1);
    std::sort(lg.adj[x].begin(), lg.adj[x].end());
  }
  return lg;
}

struct Coarsening {
  std::vector<NodeId> parent;
  std::size_t coarse_count{0};
};

// Greedy matching by decreasing merge gain 2m·e_ij - D_i·D_j (> 0); ties by (i, j).
std::optional<Coarsening> match_level(const LevelGraph& lg, Weight m) {
  std::vector<std::tuple<Weight, NodeId, NodeId>> candidates;
  for (NodeId i = 0; i < lg.size(); ++i) {
    for (const auto& [j, w] : lg.adj[i]) {
      if (j <= i) continue;
      const Weight gain = 2 * m * w - lg.degree[i] * lg.degree[j];
      if (gain > 0) candidates.emplace_back(-gain, i, j);
    }
  }
  if (candidates.empty()) return std::nullopt;
  std::sort(candidates.begin(), candidates.end());

  constexpr NodeId kFree = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> partner(lg.size(), kFree);
  for (const auto& [neg_gain, i, j] : candidates) {
    if (partner[i] != kFree || partner[j] != kFree) continue;
    partner[i] = j;
    partner[j] = i;
  }
  Coarsening c;
  c.parent.assign(lg.size(), kFree);
  for (NodeId i = 0; i < lg.size(); ++i) {
    if (c.parent[i] != kFree) continue;
    const auto id = static_cast<NodeId>(c.coarse_count++);
    c.parent[i] = id;
    if (partner[i] != kFree) c.parent[partner[i]] = id;
  }
  return c;
}

LevelGraph contract(const LevelGraph& lg, const Coarsening& c) {
  LevelGraph out;
  out.self.assign(c.coarse_count, 0);
  out.degree.assign(c.coarse_count, 0);
  out.adj.resize(c.coarse_count);
  std::vector<std::tuple<NodeId, NodeId, Weight>> links;
  for (NodeId x = 0; x < lg.size(); ++x) {
    const NodeId px = c.parent[x];
    out.self[px] += lg.self[x];
    out.degree[px] += lg.degree[x];
    for (const auto& [y, w] : lg.adj[x]) {
      if (y <= x) continue;
      const NodeId py = c.parent[y];
      if (px == py) {
        out.self[px] += w;
      } else {
        links.emplace_back(px, py, w);
        links.emplace_back(py, px, w);
      }
    }
  }
  std::sort(links.begin(), links.end());
  for (const auto& [a, b, w] : links) {
    auto& list = out.adj[a];
    if (!list.empty() && list.back().first == b) {
      list.back().second += w;
    } else {
      list.emplace_back(b, w);
    }
  }
  return out;
}

class Refiner {
 public:
  Refiner(const LevelGraph& lg, std::vector<NodeId>& cluster, Weight m)
      : lg_(lg), cluster_(cluster), m_(m), total_(lg.size(), 0), members_(lg.size()),
        link_(lg.size(), 0), seen_(lg.size(), 0) {
    for (NodeId x = 0; x < lg.size(); ++x) {
      total_[cluster_[x]] += lg.degree[x];
      members_[cluster_[x]].push_back(x);
    }
  }

  void run(int max_sweeps) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      bool moved = false;
      for (NodeId x = 0; x < lg_.size(); ++x) moved |= try_move(x);
      if (!moved) break;
    }
  }

 private:
  bool try_move(NodeId x) {
    const NodeId home = cluster_[x];
    touched_.clear();
    for (const auto& [y, w] : lg_.adj[x]) {
      const NodeId c = cluster_[y];
      if (link_[c] == 0) touched_.push_back(c);
      link_[c] += w;
    }
    const Weight to_home = link_[home];
    const Weight dx = lg_.degree[x];
    candidates_.clear();
    for (NodeId c : touched_) {
      if (c == home) continue;
      const Weight gain = 2 * m_ * (link_[c] - to_home) - dx * (total_[c] - total_[home] + dx);
      if (gain > 0) candidates_.emplace_back(-gain, c);
    }
    for (NodeId c : touched_) link_[c] = 0;
    if (candidates_.empty()) return false;
    if (members_[home].size() > 1 && !stays_connected(home, x)) return false;

    const NodeId target = std::min_element(candidates_.begin(), candidates_.end())->second;
    auto& from = members_[home];
    from.erase(std::find(from.begin(), from.end(), x));
    members_[target].push_back(x);
    total_[home] -= dx;
    total_[target] += dx;
    cluster_[x] = target;
    return true;
  }

  bool stays_connected(NodeId c, NodeId removed) {
    const auto& group = members_[c];
    const NodeId start = group.front() == removed ? group[1] : group.front();
    ++stamp_;
    std::vector<NodeId>& queue = queue_;
    queue.assign(1, start);
    seen_[start] = stamp_;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const auto& [y, w] : lg_.adj[queue[head]]) {
        if (y == removed || cluster_[y] != c || seen_[y] == stamp_) continue;
        seen_[y] = stamp_;
        queue.push_back(y);
      }
    }
    return queue.size() + 1 == group.size();
  }

  const LevelGraph& lg_;
  std::vector<NodeId>& cluster_;
  Weight m_;
  std::vector<Weight> total_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<Weight> link_;
  std::vector<NodeId> touched_;
  std::vector<std::pair<Weight, NodeId>> candidates_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t stamp_{0};
  std::vector<NodeId> queue_;
};

constexpr int kMaxRefineSweeps = 100;

// 4m²·Q as an exact integer.
Weight modularity_numerator(const ContactGraph& g, std::span<const int> assignment,
                            std::size_t clusters) {
  const auto m = static_cast<Weight>(g.edge_count());
  std::vector<Weight> internal(clusters, 0), total(clusters, 0);
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    total[assignment[v]] += static_cast<Weight>(g.degree(v));
  }
  for (const auto& e : g.edges()) {
    if (assignment[e.src] == assignment[e.dst]) ++internal[assignment[e.src]];
  }
  Weight num = 0;
  for (std::size_t c = 0; c < clusters; ++c) num += 4 * m * internal[c] - total[c] * total[c];
  return num;
}

std::vector<int> canonical_labels(std::span<const int> assignment, int& clusters) {
  std::map<int, int> relabel;
  std::vector<int> out(assignment.size());
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    auto [it, inserted] = relabel.emplace(assignment[v], static_cast<int>(relabel.size()));
    out[v] = it->second;
  }
  clusters = static_cast<int>(relabel.size());
  return out;
}

}  // namespace

std::vector<std::vector<VertexIndex>> Partition::members() const {
  std::vector<std::vector<VertexIndex>> out(static_cast<std::size_t>(clusters));
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    out[assignment[v]].push_back(static_cast<VertexIndex>(v));
  }
  return out;
}

Partition make_partition(const ContactGraph& g, std::span<const int> assignment) {
  if (assignment.size() != g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "assignment size differs from vertex count");
  }
  for (int a : assignment) {
    if (a < 0) throw Error(ErrorCode::UnassignedVertex, "negative cluster index");
  }
  Partition p;
  p.assignment = canonical_labels(assignment, p.clusters);
  p.modularity = partition_modularity(g, p.assignment);
  return p;
}

double partition_modularity(const ContactGraph& g, std::span<const int> assignment) {
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "modularity needs edges");
  int clusters = 0;
  const auto labels = canonical_labels(assignment, clusters);
  const double m = static_cast<double>(g.edge_count());
  return static_cast<double>(modularity_numerator(g, labels, static_cast<std::size_t>(clusters))) /
         (4.0 * m * m);
}

bool clusters_connected(const ContactGraph& g, std::span<const int> assignment) {
  int clusters = 0;
  const auto labels = canonical_labels(assignment, clusters);
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<int> components(static_cast<std::size_t>(clusters), 0);
  std::vector<VertexIndex> queue;
  for (VertexIndex s = 0; s < g.vertex_count(); ++s) {
    if (seen[s]) continue;
    if (++components[labels[s]] > 1) return false;
    seen[s] = 1;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (VertexIndex w : g.neighbors(queue[head])) {
        if (!seen[w] && labels[w] == labels[s]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
  }
  return true;
}

Partition greedy_modularity(const ContactGraph& g, std::uint64_t seed) {
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "clustering needs edges");
  const std::size_t n = g.vertex_count();
  const auto m = static_cast<Weight>(g.edge_count());

  std::vector<VertexIndex> order(n);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_below(rng, i + 1)]);
  std::vector<NodeId> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = static_cast<NodeId>(i);

  std::vector<LevelGraph> levels;
  std::vector<Coarsening> steps;
  levels.push_back(base_level(g, position));
  while (auto step = match_level(levels.back(), m)) {
    levels.push_back(contract(levels.back(), *step));
    steps.push_back(std::move(*step));
  }

  std::vector<NodeId> cluster(levels.back().size());
  std::iota(cluster.begin(), cluster.end(), 0u);
  for (std::size_t level = steps.size(); level-- > 0;) {
    std::vector<NodeId> finer(levels[level].size());
    for (NodeId x = 0; x < finer.size(); ++x) finer[x] = cluster[steps[level].parent[x]];
    cluster = std::move(finer);
    Refiner(levels[level], cluster, m).run(kMaxRefineSweeps);
  }

  std::vector<int> assignment(n);
  for (std::size_t i = 0; i < n; ++i) assignment[order[i]] = static_cast<int>(cluster[i]);
  return make_partition(g, assignment);
}

Partition best_of_restarts(const ContactGraph& g, std::uint64_t seed, int restarts) {
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be positive");
  std::optional<Partition> best;
  Weight best_score = 0;
  for (int r = 0; r < restarts; ++r) {
    Partition p = greedy_modularity(g, derive_seed(seed, static_cast<std::uint64_t>(r), 0x67726479));
    const Weight score =
        modularity_numerator(g, p.assignment, static_cast<std::size_t>(p.clusters));
    if (!best || score > best_score) {
      best = std::move(p);
      best_score = score;
    }
  }
  return *best;
}

std::uint64_t ClusterGraph::inter_cluster_edges() const {
  std::uint64_t s = 0;
  for (const auto& l : links) s += l.multiplicity;
  return s;
}

std::uint64_t ClusterGraph::intra_cluster_edges() const {
  std::uint64_t s = 0;
  for (const auto& n : nodes) s += n.internal_edges;
  return s;
}

ClusterGraph cluster_graph(const ContactGraph& g, const Partition& p) {
  if (p.assignment.size() != g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "partition size differs from vertex count");
  }
  ClusterGraph cg;
  cg.nodes.resize(static_cast<std::size_t>(p.clusters));
  for (int c = 0; c < p.clusters; ++c) cg.nodes[c].cluster = c;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    auto& node = cg.nodes.at(p.assignment[v]);
    ++node.size;
    ++node.orientation[static_cast<int>(g.vertex(v).orientation)];
  }
  std::map<std::pair<int, int>, std::uint64_t> links;
  for (const auto& e : g.edges()) {
    const int a = p.assignment[e.src];
    const int b = p.assignment[e.dst];
    if (a == b) {
      ++cg.nodes[a].internal_edges;
    } else {
      ++links[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [key, mult] : links) cg.links.push_back({key.first, key.second, mult});
  return cg;
}

ContactGraph quotient_graph(const ClusterGraph& cg) {
  std::vector<VertexRecord> vertices(cg.nodes.size());
  for (std::size_t c = 0; c < cg.nodes.size(); ++c) vertices[c].id = "cluster_" + std::to_string(c);
  std::vector<EdgeRecord> edges;
  for (const auto& l : cg.links) edges.push_back({vertices[l.a].id, vertices[l.b].id, NamedBy::Unknown});
  return ContactGraph(std::move(vertices), std::move(edges));
}

double resolution_limit(std::uint64_t edges) {
  if (edges == 0) throw Error(ErrorCode::InvalidArgument, "resolution limit needs m >= 1");
  return std::sqrt(2.0 * static_cast<double>(edges));
}

std::vector<SubclusterReport> recursive_subclustering(const ContactGraph& g, const Partition& p,
                                                      const SubclusteringOptions& options) {
  if (options.null_replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "null_replicates must be positive");
  }
  const double limit = resolution_limit(g.edge_count());
  const auto members = p.members();
  std::vector<SubclusterReport> out;
  for (int c = 0; c < p.clusters; ++c) {
    SubclusterReport rep;
    rep.parent_cluster = c;
    const ContactGraph sub = induced_subgraph(g, members[c]);
    rep.size = sub.vertex_count();
    rep.edges = sub.edge_count();
    rep.below_resolution = static_cast<double>(rep.edges) < limit;
    if (rep.edges < 2) {
      rep.note = "fewer than two edges; no null model";
      out.push_back(std::move(rep));
      continue;
    }
    const auto task = static_cast<std::uint64_t>(c);
    rep.subpartition = best_of_restarts(sub, derive_seed(options.seed, task, 0x737562), options.restarts);
    const auto cfg = nullmodel::SwapChainConfig::defaults_for(
        sub, options.null_replicates, derive_seed(options.seed, task, 0x6e756c6c));
    const auto nd = nullmodel::null_modularity(sub, cfg, options.restarts);
    rep.null_samples = nd.samples;
    rep.null_mean = nd.mean;
    rep.null_max = nd.max;
    rep.significant = nullmodel::significance(rep.subpartition->modularity, nd).significant;
    out.push_back(std::move(rep));
  }
  return out;
}

AtypicalityReport atypicality_report(const ContactGraph& g, const Partition& p,
                                     mixing::Covariate covariate, std::uint64_t seed) {
  const auto groups = mixing::partition_by(g, covariate);
  const std::size_t k = groups.group_count();
  AtypicalityReport rep;
  rep.covariate = covariate;
  rep.categories = groups.labels;

  std::vector<std::uint64_t> overall(k, 0);
  std::vector<std::vector<std::uint64_t>> per_cluster(static_cast<std::size_t>(p.clusters),
                                                      std::vector<std::uint64_t>(k, 0));
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    ++overall[groups.assignment[v]];
    ++per_cluster.at(p.assignment[v])[groups.assignment[v]];
  }
  const double n = static_cast<double>(g.vertex_count());
  for (auto c : overall) rep.reference.push_back(static_cast<double>(c) / n);

  const bool orientation = covariate == mixing::Covariate::Orientation;
  std::size_t msm_index = k;
  if (orientation) {
    auto it = std::find(rep.categories.begin(), rep.categories.end(),
                        std::string(display_name(Orientation::MSM)));
    if (it != rep.categories.end()) msm_index = static_cast<std::size_t>(it - rep.categories.begin());
    rep.reference_msm_share = msm_index < k ? rep.reference[msm_index] : 0.0;
  }

  for (int c = 0; c < p.clusters; ++c) {
    ClusterAtypicality a;
    a.cluster = c;
    const auto& counts = per_cluster[c];
    for (auto x : counts) a.size += x;
    a.test = mixing::homogeneity_test(counts, rep.reference,
                                      derive_seed(seed, static_cast<std::uint64_t>(c), 0x61747970));
    a.atypical = a.test.pvalue < kAtypicalityLevel;
    if (orientation && msm_index < k) {
      a.msm_share = static_cast<double>(counts[msm_index]) / static_cast<double>(a.size);
    }
    if (!a.atypical) {
      a.group = "typical";
    } else if (orientation) {
      a.group = a.msm_share > rep.reference_msm_share ? "msm_group" : "mixed_group";
    } else {
      a.group = "atypical";
    }
    if (a.atypical) ++rep.atypical_clusters;
    if (a.group == "msm_group") {
      ++rep.msm_group_clusters;
      rep.msm_group_persons += a.size;
    } else if (a.group == "mixed_group") {
      ++rep.mixed_group_clusters;
      rep.mixed_group_persons += a.size;
    }
    rep.clusters.push_back(std::move(a));
  }

  for (const auto& e : g.edges()) {
    const auto& ga = rep.clusters[p.assignment[e.src]].group;
    const auto& gb = rep.clusters[p.assignment[e.dst]].group;
    if ((ga == "msm_group" && gb == "mixed_group") || (ga == "mixed_group" && gb == "msm_group")) {
      ++rep.inter_group_edges;
    }
  }
  return rep;
}

io::CsvTable partition_csv(const ContactGraph& g, const Partition& p) {
  io::CsvTable t{{"vertex_id", "cluster"}, {}};
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    t.rows.push_back({g.vertex(v).id, std::to_string(p.assignment[v])});
  }
  return t;
}

io::CsvTable cluster_nodes_csv(const ClusterGraph& cg) {
  io::CsvTable t{{"cluster", "size", "internal_edges", "woman", "heterosexual_man", "msm",
                  "unknown"},
                 {}};
  for (const auto& n : cg.nodes) {
    t.rows.push_back({std::to_string(n.cluster), std::to_string(n.size),
                      std::to_string(n.internal_edges), std::to_string(n.orientation[0]),
                      std::to_string(n.orientation[1]), std::to_string(n.orientation[2]),
                      std::to_string(n.orientation[3])});
  }
  return t;
}

io::CsvTable cluster_links_csv(const ClusterGraph& cg) {
  io::CsvTable t{{"cluster_a", "cluster_b", "multiplicity"}, {}};
  for (const auto& l : cg.links) {
    t.rows.push_back({std::to_string(l.a), std::to_string(l.b), std::to_string(l.multiplicity)});
  }
  return t;
}

}  // namespace contactnet::community
