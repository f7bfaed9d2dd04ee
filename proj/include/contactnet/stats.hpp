#pragma once

#include <span>
#include <vector>

namespace contactnet::stats {

/// P(X >= statistic) for X ~ χ²(dof). dof == 0 yields 1.
double chi2_upper_tail(double statistic, int dof);

/// Pearson correlation; NaN when either sample has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct AnovaResult {
  double f_statistic{0.0};
  int df_between{0};
  int df_within{0};
  double pvalue{1.0};
};

/// Classical one-way ANOVA; empty groups are ignored. Requires at least two
/// non-empty groups and more observations than groups.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

double mean(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace contactnet::stats
