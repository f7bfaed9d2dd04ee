#include "contactnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "contactnet/error.hpp"
#include "contactnet/numeric.hpp"

namespace contactnet::stats {

double chi2_upper_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  NeumaierSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(x.begin(), x.end());
  const std::size_t h = x.size() / 2;
  return x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "pearson needs two equal-length samples");
  }
  const double mx = mean(x);
  const double my = mean(y);
  NeumaierSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  std::size_t k = 0, total = 0;
  NeumaierSum grand;
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    ++k;
    total += grp.size();
    for (double v : grp) grand.add(v);
  }
  if (k < 2 || total <= k) {
    throw Error(ErrorCode::InvalidArgument, "ANOVA needs two groups and residual degrees of freedom");
  }
  const double grand_mean = grand.value() / static_cast<double>(total);
  NeumaierSum between, within;
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    const double m = mean(grp);
    between.add(static_cast<double>(grp.size()) * (m - grand_mean) * (m - grand_mean));
    for (double v : grp) within.add((v - m) * (v - m));
  }
  AnovaResult r;
  r.df_between = static_cast<int>(k - 1);
  r.df_within = static_cast<int>(total - k);
  const double msb = between.value() / r.df_between;
  const double msw = within.value() / r.df_within;
  if (msw <= 0.0) {
    r.f_statistic = msb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.pvalue = msb > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.f_statistic = msb / msw;
  boost::math::fisher_f dist(r.df_between, r.df_within);
  r.pvalue = boost::math::cdf(boost::math::complement(dist, r.f_statistic));
  return r;
}

}  // namespace contactnet::stats
