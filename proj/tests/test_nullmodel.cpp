#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "contactnet/error.hpp"
#include "contactnet/nullmodel.hpp"

using namespace contactnet;
using namespace contactnet::nullmodel;

namespace {

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

std::vector<std::size_t> degrees(const ContactGraph& g) {
  std::vector<std::size_t> d;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) d.push_back(g.degree(v));
  return d;
}

std::set<std::pair<VertexIndex, VertexIndex>> edge_set(
    const std::vector<std::pair<VertexIndex, VertexIndex>>& edges) {
  std::set<std::pair<VertexIndex, VertexIndex>> s;
  for (auto [a, b] : edges) s.insert({std::min(a, b), std::max(a, b)});
  return s;
}

}  // namespace

TEST_CASE("rewiring preserves the degree sequence") {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto g = random_graph(8 + seed % 13, 0.3, seed);
    if (g.edge_count() < 2) continue;
    // Construction of the result re-validates simplicity.
    const auto h = rewire(g, 50, seed);
    CHECK(degrees(h) == degrees(g));
    CHECK(h.edge_count() == g.edge_count());
  }
}

TEST_CASE("swap chain is uniform on the four-vertex path") {
  // Degree sequence (1,2,2,1) admits exactly the paths a-b-c-d and a-c-b-d.
  const std::vector<std::pair<VertexIndex, VertexIndex>> path{{0, 1}, {1, 2}, {2, 3}};
  const auto g = ContactGraph::from_index_edges(4, path);
  SwapChain chain(g, 99);
  std::map<std::set<std::pair<VertexIndex, VertexIndex>>, int> freq;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    chain.step(10);
    ++freq[edge_set(chain.edges())];
  }
  REQUIRE(freq.size() == 2);
  const double se = std::sqrt(samples * 0.5 * 0.5);
  for (const auto& [state, count] : freq) CHECK(std::abs(count - samples / 2.0) < 3.0 * se);
  CHECK(chain.attempted() == 10u * samples);
  CHECK(chain.accepted() > 0);
}

TEST_CASE("swap chain errors and defaults") {
  const std::vector<std::pair<VertexIndex, VertexIndex>> one{{0, 1}};
  CHECK_THROWS_AS(SwapChain(ContactGraph::from_index_edges(2, one), 1), Error);
  const auto g = random_graph(20, 0.3, 4);
  const auto cfg = SwapChainConfig::defaults_for(g, 7, 3);
  CHECK(cfg.burn_in_swaps == 20 * g.edge_count());
  CHECK(cfg.thinning_swaps == 5 * g.edge_count());
  CHECK(cfg.replicates == 7);
  SwapChainConfig bad = cfg;
  bad.replicates = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("null modularity is reproducible") {
  const auto g = random_graph(30, 0.15, 12);
  const auto cfg = SwapChainConfig::defaults_for(g, 6, 5);
  const auto a = null_modularity(g, cfg, 2);
  const auto b = null_modularity(g, cfg, 2);
  CHECK(a.samples == b.samples);
  CHECK(a.samples.size() == 6);
  CHECK(a.max == *std::max_element(a.samples.begin(), a.samples.end()));
  for (double r : a.acceptance_rates) {
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("significance verdict") {
  NullModularityDistribution nd;
  nd.samples = {0.2, 0.3, 0.4, 0.5};
  nd.mean = 0.35;
  nd.max = 0.5;
  auto v = significance(0.6, nd);
  CHECK(v.significant);
  CHECK(v.exceedance == 0.0);
  v = significance(0.4, nd);
  CHECK_FALSE(v.significant);
  CHECK(v.exceedance == doctest::Approx(0.5));
  CHECK(null_samples_csv(nd).rows.size() == 4);
}
