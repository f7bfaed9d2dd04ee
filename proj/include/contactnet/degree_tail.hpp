#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contactnet/error.hpp"
#include "contactnet/graph.hpp"
#include "contactnet/io.hpp"
#include "contactnet/stats.hpp"

namespace contactnet::degree {

enum class DegreeSource { Declared, Observed };

std::string_view to_string(DegreeSource s);

struct DegreeDistribution {
  DegreeSource source{DegreeSource::Observed};
  std::map<int, std::uint64_t> counts;
  std::uint64_t n_total{0};
  std::map<int, double> p;
  /// Vertices left out because their declared count is missing.
  std::uint64_t excluded{0};

  /// Distribution of an explicit degree sample.
  static DegreeDistribution from_degrees(std::span<const int> degrees,
                                         DegreeSource source = DegreeSource::Observed);
  /// Frequencies proportional to `weights`; carries no sample (counts stay empty).
  static DegreeDistribution from_weights(const std::map<int, double>& weights);

  int k_max() const { return p.empty() ? 0 : p.rbegin()->first; }
  /// Positive degrees sorted in decreasing order, reconstructed from counts.
  std::vector<int> positive_degrees_descending() const;
};

using VertexFilter = std::function<bool(const VertexRecord&)>;

/// Declared degrees need the declared_partners column (MissingCovariate otherwise,
/// or when no selected vertex carries a value).
DegreeDistribution degree_distribution(const ContactGraph& g, DegreeSource source,
                                       const VertexFilter& keep = {});

/// Which set of degrees C_α sums over.
enum class TailNormalizer {
  Infinite,  // C_α = Σ_{k >= k0} k^-α
  Support,   // C_α = Σ_{k0 <= k <= k_max}; exact for power laws truncated at k_max
};

/// Σ_{k >= k0} k^-α, accurate to well below 1e-10 for α > 1.
double power_normalizer(double alpha, int k0);
/// Σ_{k = k0}^{k_last} k^-α.
double power_normalizer(double alpha, int k0, int k_last);

/// Kullback–Leibler divergence between the empirical tail {p_k / c : k >= k0}
/// and the power law k^-α / C_α. Degrees with p_k = 0 contribute nothing. An
/// empty tail (k0 > k_max) yields 0.
double kl_divergence(const DegreeDistribution& d, int k0, double alpha,
                     TailNormalizer normalizer = TailNormalizer::Infinite);

inline constexpr double kAlphaLowerMargin = 1e-6;
inline constexpr double kAlphaMax = 20.0;

struct PowerLawFit {
  int k0{1};
  double alpha{0.0};
  double kl_value{0.0};
  double tail_mass{0.0};   // c_{p,k0}
  double normalizer{0.0};  // C_α at the fitted exponent
  TailNormalizer normalization{TailNormalizer::Infinite};
};

/// Minimizes the divergence over α in (1 + 1e-6, 20].
/// Throws EmptyTail or DegenerateTail (fewer than two tail degrees).
PowerLawFit fit_alpha(const DegreeDistribution& d, int k0,
                      TailNormalizer normalizer = TailNormalizer::Infinite);

struct ScanEntry {
  int k0{1};
  std::optional<PowerLawFit> fit;
  std::optional<ErrorCode> flag;  // EmptyTail or DegenerateTail when fit is absent
};

/// fit_alpha at every threshold 1..k_max.
std::vector<ScanEntry> k0_scan(const DegreeDistribution& d,
                               TailNormalizer normalizer = TailNormalizer::Infinite);

struct HillEstimate {
  int m{1};
  /// (mean of k_(j) / k_(m))^-1, as printed; at most 1.
  double alpha_ratio{1.0};
  /// m / Σ ln(k_(j) / k_(m)); infinite when the top m degrees coincide.
  double alpha_log{0.0};
};

HillEstimate hill_estimator(const DegreeDistribution& d, int m);
/// Estimates for m = 1..(number of positive degrees).
std::vector<HillEstimate> hill_scan(const DegreeDistribution& d);

struct JointDegreeTable {
  /// Ordered endpoint pairs (ego degree, alter degree); each edge counted both ways.
  std::map<std::pair<int, int>, std::uint64_t> cells;
  double correlation{0.0};
  /// Bin labels after pooling, shared by both margins.
  std::vector<std::string> bins;
  std::vector<std::vector<std::uint64_t>> binned;
  double chi2_stat{0.0};
  int chi2_dof{0};
  double chi2_pvalue{1.0};
  double permutation_pvalue{1.0};
  int permutations{0};
};

inline constexpr int kDefaultPermutations = 10000;

/// Throws TooFewEdges below two edges and ZeroVariance when endpoint degrees are constant.
JointDegreeTable joint_degree_analysis(const ContactGraph& g, std::uint64_t seed = 0,
                                       int permutations = kDefaultPermutations);

/// One-way ANOVA of degree across strata (each stratum's sample).
stats::AnovaResult degree_anova(std::span<const DegreeDistribution> strata);

io::CsvTable k0_scan_csv(const std::vector<ScanEntry>& scan);
io::CsvTable hill_scan_csv(const std::vector<HillEstimate>& scan, bool logarithmic);

}  // namespace contactnet::degree
