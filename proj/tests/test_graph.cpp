#include <doctest.h>

#include <algorithm>
#include <set>

#include "contactnet/error.hpp"
#include "contactnet/graph.hpp"
#include "contactnet/numeric.hpp"

using namespace contactnet;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

ContactGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  for (VertexIndex i = 0; i < n; ++i) {
    for (VertexIndex j = i + 1; j < n; ++j) {
      if (uniform_unit(rng) < p) edges.emplace_back(i, j);
    }
  }
  return ContactGraph::from_index_edges(n, edges);
}

std::size_t component_count_without(const ContactGraph& g, VertexIndex skip) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::size_t count = 0;
  for (VertexIndex s = 0; s < g.vertex_count(); ++s) {
    if (s == skip || seen[s]) continue;
    ++count;
    std::vector<VertexIndex> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : g.neighbors(v)) {
        if (w != skip && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return count;
}

bool is_clique(const ContactGraph& g, const std::vector<VertexIndex>& members) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (!g.adjacent(members[i], members[j])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("path geodesics") {
  const Pairs p{{"a", "b"}, {"b", "c"}};
  const auto g = ContactGraph::from_edge_list(p);
  const auto s = geodesic_summary(g);
  CHECK(s.diameter == 2);
  CHECK(s.mean_L == doctest::Approx(8.0 / 12.0));
  CHECK(s.mean_L_conventional == doctest::Approx(8.0 / 6.0));
  CHECK(s.harmonic_mean == doctest::Approx(6.0 / 5.0));
  CHECK(articulation_points(g) == std::vector<std::string>{"b"});
}

TEST_CASE("triangle geodesics and clustering") {
  const Pairs p{{"a", "b"}, {"b", "c"}, {"a", "c"}};
  const auto g = ContactGraph::from_edge_list(p);
  CHECK(geodesic_summary(g).mean_L == doctest::Approx(0.5));
  CHECK(geodesic_summary(g).diameter == 1);
  CHECK(triangle_count(g) == 1);
  CHECK(clustering_coefficient(g) == doctest::Approx(1.0));
  CHECK(articulation_points(g).empty());
}

TEST_CASE("clustering needs a connected triple") {
  const Pairs p{{"a", "b"}};
  CHECK_THROWS_AS(clustering_coefficient(ContactGraph::from_edge_list(p)), Error);
}

TEST_CASE("oriented distances follow the naming direction") {
  std::vector<VertexRecord> v(3);
  v[0].id = "a";
  v[1].id = "b";
  v[2].id = "c";
  CovariateColumns cols;
  cols.named_by = true;
  const ContactGraph g(v, {{"a", "b", NamedBy::Src}, {"c", "b", NamedBy::Dst}}, cols);
  const auto d = bfs_distances(g, 0, true);
  CHECK(d[1] == 1);
  CHECK(d[2] == 2);
  CHECK(bfs_distances(g, 1, true)[2] == 1);
  CHECK(bfs_distances(g, 2, true)[0] == -1);
  CHECK(bfs_distances(g, 1, true)[0] == -1);
  CHECK(bfs_distances(g, 0, false)[2] == 2);
}

TEST_CASE("components are ordered by size") {
  const Pairs p{{"x", "y"}, {"a", "b"}, {"b", "c"}};
  const auto g = ContactGraph::from_edge_list(p);
  const auto c = connected_components(g);
  CHECK(c.sizes == std::vector<std::size_t>{3, 2});
  CHECK(c.component_id[*g.find("a")] == 0);
  const auto giant = giant_component(g);
  CHECK(giant.vertex_count() == 3);
  CHECK(giant.edge_count() == 2);
  CHECK_FALSE(is_connected(g));
  CHECK(is_connected(giant));
}

TEST_CASE("articulation points match brute force") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto g = random_graph(12, 0.18, seed);
    const std::size_t base = component_count_without(g, static_cast<VertexIndex>(-1));
    std::vector<VertexIndex> expected;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      const std::size_t without = component_count_without(g, v);
      // Removing an isolated vertex drops one component; a cut vertex adds at least one.
      if (g.degree(v) > 0 && without > base) expected.push_back(v);
    }
    CHECK(articulation_point_indices(g) == expected);
  }
}

TEST_CASE("maximal cliques match brute force") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto g = random_graph(10, 0.45, seed);
    const std::size_t n = g.vertex_count();
    std::set<std::vector<std::string>> expected;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<VertexIndex> members;
      for (VertexIndex v = 0; v < n; ++v) {
        if (mask & (1u << v)) members.push_back(v);
      }
      if (!is_clique(g, members)) continue;
      bool maximal = true;
      for (VertexIndex w = 0; w < n && maximal; ++w) {
        if (mask & (1u << w)) continue;
        auto bigger = members;
        bigger.push_back(w);
        if (is_clique(g, bigger)) maximal = false;
      }
      if (!maximal) continue;
      std::vector<std::string> ids;
      for (auto v : members) ids.push_back(g.vertex(v).id);
      std::sort(ids.begin(), ids.end());
      expected.insert(ids);
    }
    const auto found = maximal_cliques(g);
    CHECK(std::set<std::vector<std::string>>(found.begin(), found.end()) == expected);
    CHECK(found.size() == expected.size());
    for (std::size_t i = 1; i < found.size(); ++i) CHECK(found[i - 1].size() >= found[i].size());
  }
}

TEST_CASE("triangles match brute force") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_graph(14, 0.3, seed);
    std::uint64_t triangles = 0, triples = 0;
    for (VertexIndex a = 0; a < g.vertex_count(); ++a) {
      const auto d = g.degree(a);
      triples += d * (d - 1) / 2;
      for (VertexIndex b = a + 1; b < g.vertex_count(); ++b) {
        for (VertexIndex c = b + 1; c < g.vertex_count(); ++c) {
          if (g.adjacent(a, b) && g.adjacent(b, c) && g.adjacent(a, c)) ++triangles;
        }
      }
    }
    CHECK(triangle_count(g) == triangles);
    if (triples > 0) {
      CHECK(clustering_coefficient(g) ==
            doctest::Approx(3.0 * static_cast<double>(triangles) / static_cast<double>(triples)));
    }
  }
}

TEST_CASE("isolated vertices are singleton cliques") {
  std::vector<VertexRecord> v(3);
  v[0].id = "a";
  v[1].id = "b";
  v[2].id = "z";
  const ContactGraph g(v, {{"a", "b", NamedBy::Unknown}});
  const auto cliques = maximal_cliques(g);
  REQUIRE(cliques.size() == 2);
  CHECK(cliques[0] == std::vector<std::string>{"a", "b"});
  CHECK(cliques[1] == std::vector<std::string>{"z"});
}

TEST_CASE("geodesic histogram agrees with per-source BFS") {
  const auto g = giant_component(random_graph(30, 0.1, 11));
  std::uint64_t pairs = 0;
  double total = 0.0;
  int diameter = 0;
  for (VertexIndex s = 0; s < g.vertex_count(); ++s) {
    for (int d : bfs_distances(g, s)) {
      if (d > 0) {
        ++pairs;
        total += d;
        diameter = std::max(diameter, d);
      }
    }
  }
  const auto summary = geodesic_summary(g);
  const double n = static_cast<double>(g.vertex_count());
  CHECK(summary.reachable_pairs == pairs);
  CHECK(summary.diameter == diameter);
  CHECK(summary.mean_L == doctest::Approx(total / (n * (n + 1))));
}
