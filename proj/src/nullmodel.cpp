#include "contactnet/nullmodel.hpp"

#include <algorithm>
#include <cstdio>

#include "contactnet/community.hpp"
#include "contactnet/error.hpp"
#include "contactnet/stats.hpp"

namespace contactnet::nullmodel {

namespace {

std::uint64_t key(VertexIndex a, VertexIndex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

SwapChainConfig SwapChainConfig::defaults_for(const ContactGraph& g, int replicates,
                                              std::uint64_t seed) {
  const std::uint64_t m = std::max<std::uint64_t>(g.edge_count(), 1);
  return SwapChainConfig{20 * m, 5 * m, replicates, seed};
}

void SwapChainConfig::validate() const {
  if (burn_in_swaps == 0 || thinning_swaps == 0 || replicates < 1) {
    throw Error(ErrorCode::InvalidArgument, "swap chain parameters must be positive");
  }
}

SwapChain::SwapChain(const ContactGraph& g, std::uint64_t seed) : base_(&g), rng_(seed) {
  if (g.edge_count() < 2) throw Error(ErrorCode::TooFewEdges, "edge swaps need two edges");
  edges_.reserve(g.edge_count());
  present_.reserve(g.edge_count() * 2);
  for (const auto& e : g.edges()) {
    edges_.emplace_back(e.src, e.dst);
    present_.insert(key(e.src, e.dst));
  }
}

void SwapChain::step(std::uint64_t attempts) {
  const std::uint64_t m = edges_.size();
  for (std::uint64_t t = 0; t < attempts; ++t) {
    ++attempted_;
    const std::uint64_t i = uniform_below(rng_, m);
    std::uint64_t j = uniform_below(rng_, m - 1);
    if (j >= i) ++j;
    const auto [a, b] = edges_[i];
    auto [c, d] = edges_[j];
    if (rng_() & 1) std::swap(c, d);  // (a,c),(b,d) or (a,d),(b,c)
    if (a == c || b == d) continue;
    const std::uint64_t k1 = key(a, c);
    const std::uint64_t k2 = key(b, d);
    if (present_.count(k1) || present_.count(k2)) continue;
    present_.erase(key(a, b));
    present_.erase(key(edges_[j].first, edges_[j].second));
    present_.insert(k1);
    present_.insert(k2);
    edges_[i] = {a, c};
    edges_[j] = {b, d};
    ++accepted_;
  }
}

ContactGraph SwapChain::graph() const {
  std::vector<VertexRecord> vertices(base_->vertices().begin(), base_->vertices().end());
  std::vector<EdgeRecord> records;
  records.reserve(edges_.size());
  for (const auto& [a, b] : edges_) {
    records.push_back({vertices[a].id, vertices[b].id, NamedBy::Unknown});
  }
  CovariateColumns cols = base_->columns();
  cols.named_by = false;
  return ContactGraph(std::move(vertices), std::move(records), cols);
}

ContactGraph rewire(const ContactGraph& g, std::uint64_t swaps, std::uint64_t seed) {
  SwapChain chain(g, seed);
  chain.step(swaps);
  return chain.graph();
}

NullModularityDistribution null_modularity(const ContactGraph& g, const SwapChainConfig& cfg,
                                           int restarts) {
  cfg.validate();
  if (g.edge_count() < 2) throw Error(ErrorCode::TooFewEdges, "null model needs two edges");
  NullModularityDistribution nd;
  nd.samples.resize(static_cast<std::size_t>(cfg.replicates));
  nd.acceptance_rates.resize(nd.samples.size());
  nd.cluster_counts.resize(nd.samples.size());
  // Each replicate owns a stream derived from (seed, replicate); results land by index.
  for (int r = 1; r <= cfg.replicates; ++r) {
    const auto idx = static_cast<std::uint64_t>(r);
    SwapChain chain(g, derive_seed(cfg.seed, idx, 0x73776170));
    chain.step(cfg.burn_in_swaps + idx * cfg.thinning_swaps);
    const auto sample = chain.graph();
    const auto p = community::best_of_restarts(sample, derive_seed(cfg.seed, idx, 0x636c7573), restarts);
    nd.samples[r - 1] = p.modularity;
    nd.cluster_counts[r - 1] = p.clusters;
    nd.acceptance_rates[r - 1] =
        static_cast<double>(chain.accepted()) / static_cast<double>(chain.attempted());
  }
  nd.mean = stats::mean(nd.samples);
  nd.max = *std::max_element(nd.samples.begin(), nd.samples.end());
  return nd;
}

SignificanceVerdict significance(double observed_q, const NullModularityDistribution& nd) {
  if (nd.samples.empty()) throw Error(ErrorCode::InvalidArgument, "empty null distribution");
  SignificanceVerdict v;
  v.observed = observed_q;
  v.null_mean = nd.mean;
  v.null_max = nd.max;
  v.significant = observed_q > nd.max;
  const auto hits = std::count_if(nd.samples.begin(), nd.samples.end(),
                                  [&](double q) { return q >= observed_q; });
  v.exceedance = static_cast<double>(hits) / static_cast<double>(nd.samples.size());
  return v;
}

io::CsvTable null_samples_csv(const NullModularityDistribution& nd) {
  io::CsvTable t{{"modularity"}, {}};
  for (double q : nd.samples) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", q);
    t.rows.push_back({buf});
  }
  return t;
}

}  // namespace contactnet::nullmodel
