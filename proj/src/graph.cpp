#include "contactnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "contactnet/error.hpp"
#include "contactnet/numeric.hpp"

namespace contactnet {

namespace {

std::uint64_t pair_key(VertexIndex a, VertexIndex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

ContactGraph::ContactGraph(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges,
                           CovariateColumns columns)
    : vertices_(std::move(vertices)), columns_(columns) {
  index_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& id = vertices_[i].id;
    if (id.empty()) throw Error(ErrorCode::MalformedRow, "empty vertex id", i + 1);
    if (vertices_[i].age_at_detection && *vertices_[i].age_at_detection < 0) {
      throw Error(ErrorCode::MalformedRow, "negative age for '" + id + "'", i + 1);
    }
    if (vertices_[i].declared_partners && *vertices_[i].declared_partners < 0) {
      throw Error(ErrorCode::MalformedRow, "negative declared_partners for '" + id + "'", i + 1);
    }
    if (!index_.emplace(id, static_cast<VertexIndex>(i)).second) {
      throw Error(ErrorCode::DuplicateVertexId, "'" + id + "'", i + 1);
    }
  }

  adjacency_.resize(vertices_.size());
  edges_.reserve(edges.size());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const auto& e = edges[j];
    auto s = find(e.src);
    auto d = find(e.dst);
    if (!s) throw Error(ErrorCode::DanglingEndpoint, "unknown vertex '" + e.src + "'", j + 1);
    if (!d) throw Error(ErrorCode::DanglingEndpoint, "unknown vertex '" + e.dst + "'", j + 1);
    if (*s == *d) throw Error(ErrorCode::SelfLoop, "'" + e.src + "'", j + 1);
    if (!seen.insert(pair_key(*s, *d)).second) {
      throw Error(ErrorCode::DuplicateEdge, "'" + e.src + "'-'" + e.dst + "'", j + 1);
    }
    edges_.push_back({*s, *d, e.named_by});
    adjacency_[*s].push_back(*d);
    adjacency_[*d].push_back(*s);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

ContactGraph ContactGraph::from_edge_list(
    std::span<const std::pair<std::string, std::string>> edges) {
  std::vector<VertexRecord> vertices;
  std::unordered_set<std::string> known;
  std::vector<EdgeRecord> records;
  auto add = [&](const std::string& id) {
    if (known.insert(id).second) {
      VertexRecord rec;
      rec.id = id;
      vertices.push_back(std::move(rec));
    }
  };
  for (const auto& [a, b] : edges) {
    add(a);
    add(b);
    records.push_back({a, b, NamedBy::Unknown});
  }
  return ContactGraph(std::move(vertices), std::move(records));
}

ContactGraph ContactGraph::from_index_edges(
    std::size_t n, std::span<const std::pair<VertexIndex, VertexIndex>> edges) {
  std::vector<VertexRecord> vertices(n);
  auto name = [](std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "v%06zu", i);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < n; ++i) vertices[i].id = name(i);
  std::vector<EdgeRecord> records;
  records.reserve(edges.size());
  for (const auto& [a, b] : edges) records.push_back({name(a), name(b), NamedBy::Unknown});
  return ContactGraph(std::move(vertices), std::move(records));
}

bool ContactGraph::adjacent(VertexIndex u, VertexIndex v) const {
  const auto& list = adjacency_.at(u);
  return std::binary_search(list.begin(), list.end(), v);
}

std::optional<VertexIndex> ContactGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EdgeRecord> ContactGraph::edge_records() const {
  std::vector<EdgeRecord> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) {
    out.push_back({vertices_[e.src].id, vertices_[e.dst].id, e.named_by});
  }
  return out;
}

ComponentIndex connected_components(const ContactGraph& g) {
  const std::size_t n = g.vertex_count();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> raw(n, kUnset);
  std::vector<std::size_t> sizes;
  std::vector<VertexIndex> first_member;
  std::deque<VertexIndex> queue;
  for (VertexIndex s = 0; s < n; ++s) {
    if (raw[s] != kUnset) continue;
    const auto label = static_cast<std::uint32_t>(sizes.size());
    sizes.push_back(0);
    first_member.push_back(s);
    raw[s] = label;
    queue.push_back(s);
    while (!queue.empty()) {
      VertexIndex u = queue.front();
      queue.pop_front();
      ++sizes[label];
      for (VertexIndex w : g.neighbors(u)) {
        if (raw[w] == kUnset) {
          raw[w] = label;
          queue.push_back(w);
        }
      }
    }
  }

  std::vector<std::string_view> min_id(sizes.size());
  for (VertexIndex v = 0; v < n; ++v) {
    auto& slot = min_id[raw[v]];
    if (slot.empty() || g.vertex(v).id < slot) slot = g.vertex(v).id;
  }
  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return min_id[a] < min_id[b];
  });
  std::vector<std::uint32_t> relabel(sizes.size());
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) relabel[order[rank]] = rank;

  ComponentIndex out;
  out.component_id.resize(n);
  for (VertexIndex v = 0; v < n; ++v) out.component_id[v] = relabel[raw[v]];
  out.sizes.resize(sizes.size());
  for (std::uint32_t c = 0; c < sizes.size(); ++c) out.sizes[relabel[c]] = sizes[c];
  return out;
}

ContactGraph induced_subgraph(const ContactGraph& g, std::span<const VertexIndex> members) {
  std::vector<VertexIndex> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<char> keep(g.vertex_count(), 0);
  std::vector<VertexRecord> vertices;
  vertices.reserve(sorted.size());
  for (VertexIndex v : sorted) {
    keep.at(v) = 1;
    vertices.push_back(g.vertex(v));
  }
  std::vector<EdgeRecord> edges;
  for (const auto& e : g.edges()) {
    if (keep[e.src] && keep[e.dst]) {
      edges.push_back({g.vertex(e.src).id, g.vertex(e.dst).id, e.named_by});
    }
  }
  return ContactGraph(std::move(vertices), std::move(edges), g.columns());
}

ContactGraph giant_component(const ContactGraph& g) {
  if (g.vertex_count() == 0) throw Error(ErrorCode::EmptyGraph, "graph has no vertices");
  auto comps = connected_components(g);
  std::vector<VertexIndex> members;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (comps.component_id[v] == 0) members.push_back(v);
  }
  return induced_subgraph(g, members);
}

bool is_connected(const ContactGraph& g) {
  return g.vertex_count() > 0 && connected_components(g).sizes.size() == 1;
}

namespace {

using OutLists = std::vector<std::vector<VertexIndex>>;

OutLists oriented_out_lists(const ContactGraph& g) {
  OutLists out(g.vertex_count());
  for (const auto& e : g.edges()) {
    switch (e.named_by) {
      case NamedBy::Src: out[e.src].push_back(e.dst); break;
      case NamedBy::Dst: out[e.dst].push_back(e.src); break;
      case NamedBy::Both:
      case NamedBy::Unknown:
        out[e.src].push_back(e.dst);
        out[e.dst].push_back(e.src);
        break;
    }
  }
  for (auto& list : out) std::sort(list.begin(), list.end());
  return out;
}

template <typename NeighborFn>
void bfs_into(std::size_t n, VertexIndex source, NeighborFn&& neighbors, std::vector<int>& dist,
              std::vector<VertexIndex>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexIndex u = queue[head];
    for (VertexIndex w : neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  (void)n;
}

}  // namespace

std::vector<int> bfs_distances(const ContactGraph& g, VertexIndex source, bool oriented) {
  if (source >= g.vertex_count()) throw Error(ErrorCode::InvalidArgument, "source out of range");
  std::vector<int> dist(g.vertex_count());
  std::vector<VertexIndex> queue;
  queue.reserve(g.vertex_count());
  if (oriented) {
    auto out = oriented_out_lists(g);
    bfs_into(g.vertex_count(), source,
             [&](VertexIndex u) { return std::span<const VertexIndex>(out[u]); }, dist, queue);
  } else {
    bfs_into(g.vertex_count(), source, [&](VertexIndex u) { return g.neighbors(u); }, dist,
             queue);
  }
  return dist;
}

GeodesicSummary geodesic_summary(const ContactGraph& g, bool oriented) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "geodesic summary of an empty graph");

  OutLists out;
  if (oriented) out = oriented_out_lists(g);
  auto neighbors = [&](VertexIndex u) {
    return oriented ? std::span<const VertexIndex>(out[u]) : g.neighbors(u);
  };

  // Per-source distance arrays are reused; only integer histogram counts accumulate.
  std::vector<std::uint64_t> counts(1, 0);
  std::vector<int> dist(n);
  std::vector<VertexIndex> queue;
  queue.reserve(n);
  for (VertexIndex s = 0; s < n; ++s) {
    bfs_into(n, s, neighbors, dist, queue);
    for (VertexIndex v : queue) {
      const auto d = static_cast<std::size_t>(dist[v]);
      if (d == 0) continue;
      if (d >= counts.size()) counts.resize(d + 1, 0);
      ++counts[d];
    }
  }

  GeodesicSummary summary;
  summary.vertex_count = n;
  summary.oriented = oriented;
  std::uint64_t distance_sum = 0;
  NeumaierSum inverse_sum;
  for (std::size_t d = 1; d < counts.size(); ++d) {
    if (counts[d] == 0) continue;
    summary.histogram[static_cast<int>(d)] = counts[d];
    summary.reachable_pairs += counts[d];
    summary.diameter = static_cast<int>(d);
    distance_sum += counts[d] * d;
    inverse_sum.add(static_cast<double>(counts[d]) / static_cast<double>(d));
  }
  const double nn = static_cast<double>(n);
  summary.mean_L = static_cast<double>(distance_sum) / (nn * (nn + 1.0));
  summary.mean_L_conventional =
      n > 1 ? static_cast<double>(distance_sum) / (nn * (nn - 1.0))
            : std::numeric_limits<double>::quiet_NaN();
  summary.harmonic_mean = inverse_sum.value() > 0.0
                              ? nn * (nn - 1.0) / inverse_sum.value()
                              : std::numeric_limits<double>::infinity();
  return summary;
}

std::vector<VertexIndex> articulation_point_indices(const ContactGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<int> order(n, -1);
  std::vector<int> low(n, 0);
  std::vector<char> is_cut(n, 0);
  struct Frame {
    VertexIndex vertex;
    VertexIndex parent;
    std::size_t next;
  };
  std::vector<Frame> stack;
  int clock = 0;
  for (VertexIndex root = 0; root < n; ++root) {
    if (order[root] >= 0) continue;
    int root_children = 0;
    order[root] = low[root] = clock++;
    stack.push_back({root, root, 0});
    while (!stack.empty()) {
      auto& f = stack.back();
      auto nbrs = g.neighbors(f.vertex);
      if (f.next < nbrs.size()) {
        VertexIndex w = nbrs[f.next++];
        if (order[w] < 0) {
          order[w] = low[w] = clock++;
          if (f.vertex == root) ++root_children;
          stack.push_back({w, f.vertex, 0});
        } else if (w != f.parent) {
          low[f.vertex] = std::min(low[f.vertex], order[w]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      auto& up = stack.back();
      low[up.vertex] = std::min(low[up.vertex], low[done.vertex]);
      if (up.vertex != root && low[done.vertex] >= order[up.vertex]) is_cut[up.vertex] = 1;
    }
    if (root_children > 1) is_cut[root] = 1;
  }
  std::vector<VertexIndex> out;
  for (VertexIndex v = 0; v < n; ++v) {
    if (is_cut[v]) out.push_back(v);
  }
  return out;
}

std::vector<std::string> articulation_points(const ContactGraph& g) {
  std::vector<std::string> ids;
  for (VertexIndex v : articulation_point_indices(g)) ids.push_back(g.vertex(v).id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::uint64_t triangle_count(const ContactGraph& g) {
  std::uint64_t triangles = 0;
  for (const auto& e : g.edges()) {
    VertexIndex u = std::min(e.src, e.dst);
    VertexIndex v = std::max(e.src, e.dst);
    auto a = g.neighbors(u);
    auto b = g.neighbors(v);
    // Count each triangle once, at its edge between the two smallest vertices.
    auto ia = std::upper_bound(a.begin(), a.end(), v);
    auto ib = std::upper_bound(b.begin(), b.end(), v);
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++triangles;
        ++ia;
        ++ib;
      }
    }
  }
  return triangles;
}

double clustering_coefficient(const ContactGraph& g) {
  std::uint64_t triples = 0;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const std::uint64_t d = g.degree(v);
    triples += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  if (triples == 0) throw Error(ErrorCode::NoTriples, "graph has no path of length 2");
  return 3.0 * static_cast<double>(triangle_count(g)) / static_cast<double>(triples);
}

namespace {

using VertexSet = std::vector<VertexIndex>;  // sorted

VertexSet intersect(const VertexSet& a, std::span<const VertexIndex> b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Bron–Kerbosch with Tomita pivoting: pivot maximizes |P ∩ N(u)| over u ∈ P ∪ X.
void expand(const ContactGraph& g, VertexSet& clique, VertexSet candidates, VertexSet excluded,
            std::vector<VertexSet>& found) {
  if (candidates.empty()) {
    if (excluded.empty()) found.push_back(clique);
    return;
  }
  VertexIndex pivot = candidates.front();
  std::size_t best = 0;
  bool first = true;
  for (const VertexSet* pool : {&candidates, &excluded}) {
    for (VertexIndex u : *pool) {
      const std::size_t hits = intersect(candidates, g.neighbors(u)).size();
      if (first || hits > best) {
        best = hits;
        pivot = u;
        first = false;
      }
    }
  }
  VertexSet branch;
  std::set_difference(candidates.begin(), candidates.end(), g.neighbors(pivot).begin(),
                      g.neighbors(pivot).end(), std::back_inserter(branch));
  for (VertexIndex v : branch) {
    clique.push_back(v);
    expand(g, clique, intersect(candidates, g.neighbors(v)), intersect(excluded, g.neighbors(v)),
           found);
    clique.pop_back();
    candidates.erase(std::lower_bound(candidates.begin(), candidates.end(), v));
    excluded.insert(std::lower_bound(excluded.begin(), excluded.end(), v), v);
  }
}

// Smallest-last (degeneracy) ordering.
std::vector<VertexIndex> degeneracy_order(const ContactGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> deg(n);
  std::size_t max_deg = 0;
  for (VertexIndex v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v] = g.degree(v));
  std::vector<std::vector<VertexIndex>> buckets(max_deg + 1);
  for (VertexIndex v = 0; v < n; ++v) buckets[deg[v]].push_back(v);
  std::vector<char> removed(n, 0);
  std::vector<VertexIndex> order;
  order.reserve(n);
  std::size_t cursor = 0;
  while (order.size() < n) {
    cursor = 0;
    while (buckets[cursor].empty()) ++cursor;
    VertexIndex v = buckets[cursor].back();
    buckets[cursor].pop_back();
    if (removed[v] || deg[v] != cursor) continue;
    removed[v] = 1;
    order.push_back(v);
    for (VertexIndex w : g.neighbors(v)) {
      if (!removed[w]) buckets[--deg[w]].push_back(w);
    }
  }
  return order;
}

}  // namespace

std::vector<Clique> maximal_cliques(const ContactGraph& g) {
  const std::size_t n = g.vertex_count();
  auto order = degeneracy_order(g);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  std::vector<VertexSet> found;
  VertexSet clique;
  for (VertexIndex v : order) {
    VertexSet later, earlier;
    for (VertexIndex w : g.neighbors(v)) (rank[w] > rank[v] ? later : earlier).push_back(w);
    clique.assign(1, v);
    expand(g, clique, std::move(later), std::move(earlier), found);
  }

  std::vector<Clique> out;
  out.reserve(found.size());
  for (const auto& c : found) {
    Clique ids;
    ids.reserve(c.size());
    for (VertexIndex v : c) ids.push_back(g.vertex(v).id);
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end(), [](const Clique& a, const Clique& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return out;
}

}  // namespace contactnet
