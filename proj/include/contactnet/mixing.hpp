#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contactnet/graph.hpp"
#include "contactnet/io.hpp"

namespace contactnet::mixing {

enum class Covariate { Orientation, DetectionMode, Region, AgeGroup };

std::string_view to_string(Covariate c);
std::optional<Covariate> parse_covariate(std::string_view name);

/// Group labels plus one group index per vertex (-1 = unassigned).
struct CovariatePartition {
  std::vector<std::string> labels;
  std::vector<int> assignment;

  std::size_t group_count() const { return labels.size(); }
};

/// Groups vertices by a covariate. Missing values form an "unknown" group; ages
/// use 5-year bins [15,20) .. [60,65) plus "<15" and "65+". Only non-empty groups
/// are kept, in a fixed order. Throws MissingCovariate when the column is absent
/// or holds no value.
CovariatePartition partition_by(const ContactGraph& g, Covariate covariate);

/// Partition from raw group indices; labels are the indices.
CovariatePartition partition_from_assignment(std::span<const int> assignment);

/// Symmetric J×J edge-fraction matrix. A within-group edge adds 1/m to m_ii, an
/// edge between groups i != j adds 1/(2m) to both m_ij and m_ji.
struct MixingMatrix {
  std::size_t groups{0};
  std::uint64_t edges{0};
  /// 2m·m_ij as exact integers, row-major.
  std::vector<std::uint64_t> endpoint_counts;
  std::vector<double> fractions;  // row-major m_ij
  std::vector<double> row_sums;

  double at(std::size_t i, std::size_t j) const { return fractions[i * groups + j]; }
};

MixingMatrix mixing_matrix(const ContactGraph& g, const CovariatePartition& p);

/// Q = Tr(M) - ||M²||.
double modularity(const MixingMatrix& mm);
/// r = Q / (1 - ||M²||); DegenerateMatrix when ||M²|| = 1.
double assortativity(const MixingMatrix& mm);

io::CsvTable mixing_csv(const MixingMatrix& mm, std::span<const std::string> labels);

inline constexpr int kMonteCarloDraws = 10000;

struct HomogeneityResult {
  double statistic{0.0};
  int dof{0};
  double pvalue{1.0};
  std::vector<double> expected;
  std::vector<std::uint64_t> observed;
  /// Some expected count below 5; a Monte Carlo p-value accompanies the asymptotic one.
  bool small_expected{false};
  std::optional<double> monte_carlo_pvalue;
};

/// χ² goodness of fit of `observed` counts against `reference` proportions.
HomogeneityResult homogeneity_test(std::span<const std::uint64_t> observed,
                                   std::span<const double> reference, std::uint64_t seed = 0);

struct LagStratum {
  std::string ego_mode;
  std::size_t edges{0};
  double mean_days{0.0};
  double median_days{0.0};
};

struct DetectionLagReport {
  std::vector<LagStratum> strata;  // one per ego detection mode with data, then "all"
  std::size_t excluded_edges{0};
  std::vector<int> lags;  // per usable edge, in edge order
};

/// Days between the detection dates of each edge's endpoints, grouped by the
/// ego's detection mode. Ego is the naming endpoint when named_by is SRC or DST,
/// otherwise the later-detected endpoint (src on ties).
DetectionLagReport detection_lag(const ContactGraph& g);

}  // namespace contactnet::mixing
