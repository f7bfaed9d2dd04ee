#pragma once

#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "contactnet/graph.hpp"
#include "contactnet/io.hpp"
#include "contactnet/numeric.hpp"

namespace contactnet::nullmodel {

struct SwapChainConfig {
  std::uint64_t burn_in_swaps{1};
  std::uint64_t thinning_swaps{1};
  int replicates{100};
  std::uint64_t seed{1};

  /// Burn-in 20·m and thinning 5·m attempted swaps.
  static SwapChainConfig defaults_for(const ContactGraph& g, int replicates, std::uint64_t seed);
  void validate() const;
};

/// Double-edge-swap Markov chain over simple graphs with a fixed degree sequence.
///
/// One step picks two distinct edges (a,b), (c,d) uniformly, proposes (a,c),(b,d)
/// or (a,d),(b,c) with equal probability, and stays put when the proposal would
/// create a self-loop or a duplicate edge. Steps count attempts, accepted or not.
class SwapChain {
 public:
  SwapChain(const ContactGraph& g, std::uint64_t seed);

  void step(std::uint64_t attempts);

  std::uint64_t attempted() const noexcept { return attempted_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  const std::vector<std::pair<VertexIndex, VertexIndex>>& edges() const noexcept { return edges_; }

  /// Current state as a graph carrying the original vertex records.
  ContactGraph graph() const;

 private:
  const ContactGraph* base_;
  std::vector<std::pair<VertexIndex, VertexIndex>> edges_;
  std::unordered_set<std::uint64_t> present_;
  Rng rng_;
  std::uint64_t attempted_{0};
  std::uint64_t accepted_{0};
};

/// `swaps` attempted double-edge swaps from g. Throws TooFewEdges when m < 2.
ContactGraph rewire(const ContactGraph& g, std::uint64_t swaps, std::uint64_t seed);

struct NullModularityDistribution {
  std::vector<double> samples;  // replicate order
  std::vector<double> acceptance_rates;
  std::vector<int> cluster_counts;
  double mean{0.0};
  double max{0.0};
};

/// Replicate r (1-based) runs its own chain for burn_in + r·thinning attempts
/// from g, then records the best-of-`restarts` greedy modularity.
NullModularityDistribution null_modularity(const ContactGraph& g, const SwapChainConfig& cfg,
                                           int restarts = 1);

struct SignificanceVerdict {
  bool significant{false};  // observed > null max
  double exceedance{0.0};   // share of null samples >= observed
  double observed{0.0};
  double null_mean{0.0};
  double null_max{0.0};
};

SignificanceVerdict significance(double observed_q, const NullModularityDistribution& nd);

io::CsvTable null_samples_csv(const NullModularityDistribution& nd);

}  // namespace contactnet::nullmodel
