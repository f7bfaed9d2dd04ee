#include "contactnet/degree_tail.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "contactnet/numeric.hpp"

namespace contactnet::degree {

std::string_view to_string(DegreeSource s) {
  return s == DegreeSource::Declared ? "declared" : "observed";
}

namespace {

void normalize(DegreeDistribution& d) {
  d.p.clear();
  for (const auto& [k, c] : d.counts) {
    d.p[k] = static_cast<double>(c) / static_cast<double>(d.n_total);
  }
}

}  // namespace

DegreeDistribution DegreeDistribution::from_degrees(std::span<const int> degrees,
                                                    DegreeSource source) {
  DegreeDistribution d;
  d.source = source;
  for (int k : degrees) {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
    ++d.counts[k];
  }
  d.n_total = degrees.size();
  normalize(d);
  return d;
}

DegreeDistribution DegreeDistribution::from_weights(const std::map<int, double>& weights) {
  DegreeDistribution d;
  NeumaierSum total;
  for (const auto& [k, w] : weights) {
    if (k < 0 || !(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "bad degree weight");
    total.add(w);
  }
  if (!(total.value() > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights sum to zero");
  for (const auto& [k, w] : weights) {
    if (w > 0.0) d.p[k] = w / total.value();
  }
  return d;
}

std::vector<int> DegreeDistribution::positive_degrees_descending() const {
  std::vector<int> out;
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    if (it->first <= 0) continue;
    out.insert(out.end(), it->second, it->first);
  }
  return out;
}

DegreeDistribution degree_distribution(const ContactGraph& g, DegreeSource source,
                                       const VertexFilter& keep) {
  std::vector<int> sample;
  std::uint64_t excluded = 0;
  if (source == DegreeSource::Declared && !g.columns().declared_partners) {
    throw Error(ErrorCode::MissingCovariate, "declared_partners column absent");
  }
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const auto& rec = g.vertex(v);
    if (keep && !keep(rec)) continue;
    if (source == DegreeSource::Observed) {
      sample.push_back(static_cast<int>(g.degree(v)));
    } else if (rec.declared_partners) {
      sample.push_back(*rec.declared_partners);
    } else {
      ++excluded;
    }
  }
  if (source == DegreeSource::Declared && sample.empty()) {
    throw Error(ErrorCode::MissingCovariate, "no declared_partners values");
  }
  auto d = DegreeDistribution::from_degrees(sample, source);
  d.excluded = excluded;
  return d;
}

double power_normalizer(double alpha, int k0) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must exceed 1");
  if (k0 < 1) throw Error(ErrorCode::InvalidArgument, "k0 must be >= 1");
  // Direct sum up to N, then Euler–Maclaurin for the remainder Σ_{k>=N} k^-α:
  // ∫_N^∞ + f(N)/2 - Σ B_2j/(2j)! f^(2j-1)(N), three correction terms.
  const int n = std::max(k0, 1000);
  NeumaierSum head;
  for (int k = n - 1; k >= k0; --k) head.add(std::pow(static_cast<double>(k), -alpha));
  const double N = n;
  const double fN = std::pow(N, -alpha);
  const double a = alpha;
  double tail = N * fN / (a - 1.0) + 0.5 * fN;
  tail += a * fN / N / 12.0;
  tail -= a * (a + 1) * (a + 2) * fN / (N * N * N) / 720.0;
  tail += a * (a + 1) * (a + 2) * (a + 3) * (a + 4) * fN / (N * N * N * N * N) / 30240.0;
  return head.value() + tail;
}

double power_normalizer(double alpha, int k0, int k_last) {
  if (k0 < 1 || k_last < k0) throw Error(ErrorCode::InvalidArgument, "bad normalizer range");
  NeumaierSum s;
  for (int k = k_last; k >= k0; --k) s.add(std::pow(static_cast<double>(k), -alpha));
  return s.value();
}

namespace {

struct Tail {
  std::vector<std::pair<int, double>> terms;  // (k, p_k), p_k > 0
  double mass{0.0};
};

Tail tail_of(const DegreeDistribution& d, int k0) {
  Tail t;
  NeumaierSum mass;
  for (auto it = d.p.lower_bound(k0); it != d.p.end(); ++it) {
    if (it->second > 0.0) {
      t.terms.emplace_back(it->first, it->second);
      mass.add(it->second);
    }
  }
  t.mass = mass.value();
  return t;
}

double normalizer_for(const Tail& t, int k0, double alpha, TailNormalizer kind) {
  return kind == TailNormalizer::Infinite ? power_normalizer(alpha, k0)
                                          : power_normalizer(alpha, k0, t.terms.back().first);
}

double divergence(const Tail& t, double log_normalizer, double alpha) {
  NeumaierSum s;
  for (const auto& [k, pk] : t.terms) {
    const double q = pk / t.mass;
    s.add(q * (log_normalizer + std::log(q) + alpha * std::log(static_cast<double>(k))));
  }
  return s.value();
}

}  // namespace

double kl_divergence(const DegreeDistribution& d, int k0, double alpha,
                     TailNormalizer normalizer) {
  if (k0 < 1) throw Error(ErrorCode::InvalidArgument, "k0 must be >= 1");
  if (!(alpha > 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must exceed 1");
  const Tail t = tail_of(d, k0);
  if (t.terms.empty()) return 0.0;
  return divergence(t, std::log(normalizer_for(t, k0, alpha, normalizer)), alpha);
}

PowerLawFit fit_alpha(const DegreeDistribution& d, int k0, TailNormalizer normalizer) {
  if (k0 < 1) throw Error(ErrorCode::InvalidArgument, "k0 must be >= 1");
  const Tail t = tail_of(d, k0);
  if (t.terms.empty()) {
    throw Error(ErrorCode::EmptyTail, "no degree >= " + std::to_string(k0));
  }
  if (t.terms.size() < 2) {
    throw Error(ErrorCode::DegenerateTail, "single tail degree " + std::to_string(t.terms[0].first));
  }
  // The divergence is convex in α (log-sum-exp plus a linear term), so a
  // bracketed Brent search over the whole admissible range finds the minimum.
  auto objective = [&](double alpha) {
    return divergence(t, std::log(normalizer_for(t, k0, alpha, normalizer)), alpha);
  };
  const auto [alpha, value] =
      boost::math::tools::brent_find_minima(objective, 1.0 + kAlphaLowerMargin, kAlphaMax, 40);
  PowerLawFit fit;
  fit.k0 = k0;
  fit.alpha = alpha;
  fit.kl_value = std::max(value, 0.0);
  fit.tail_mass = t.mass;
  fit.normalizer = normalizer_for(t, k0, alpha, normalizer);
  fit.normalization = normalizer;
  return fit;
}

std::vector<ScanEntry> k0_scan(const DegreeDistribution& d, TailNormalizer normalizer) {
  std::vector<ScanEntry> out;
  for (int k0 = 1; k0 <= std::max(d.k_max(), 1); ++k0) {
    ScanEntry entry;
    entry.k0 = k0;
    try {
      entry.fit = fit_alpha(d, k0, normalizer);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyTail && e.code() != ErrorCode::DegenerateTail) throw;
      entry.flag = e.code();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

HillEstimate hill_from_sorted(const std::vector<int>& sorted, int m) {
  const double km = sorted[m - 1];
  NeumaierSum ratios, logs;
  for (int j = 0; j < m; ++j) {
    ratios.add(sorted[j] / km);
    logs.add(std::log(sorted[j] / km));
  }
  HillEstimate h;
  h.m = m;
  h.alpha_ratio = static_cast<double>(m) / ratios.value();
  h.alpha_log = logs.value() > 0.0 ? static_cast<double>(m) / logs.value()
                                   : std::numeric_limits<double>::infinity();
  return h;
}

}  // namespace

HillEstimate hill_estimator(const DegreeDistribution& d, int m) {
  const auto sorted = d.positive_degrees_descending();
  if (m < 1 || static_cast<std::size_t>(m) > sorted.size()) {
    throw Error(ErrorCode::BadM, "m=" + std::to_string(m) + " outside [1, " +
                                     std::to_string(sorted.size()) + "]");
  }
  return hill_from_sorted(sorted, m);
}

std::vector<HillEstimate> hill_scan(const DegreeDistribution& d) {
  const auto sorted = d.positive_degrees_descending();
  std::vector<HillEstimate> out;
  out.reserve(sorted.size());
  // Running sums: Σ k_(j) / k_(m) = S_m / k_(m) and Σ ln(k_(j) / k_(m)) = L_m - m ln k_(m).
  NeumaierSum degree_sum, log_sum;
  for (int m = 1; m <= static_cast<int>(sorted.size()); ++m) {
    const double km = sorted[m - 1];
    degree_sum.add(km);
    log_sum.add(std::log(km));
    HillEstimate h;
    h.m = m;
    h.alpha_ratio = static_cast<double>(m) * km / degree_sum.value();
    const double logs = log_sum.value() - m * std::log(km);
    h.alpha_log = sorted.front() == sorted[m - 1] || !(logs > 0.0)
                      ? std::numeric_limits<double>::infinity()
                      : static_cast<double>(m) / logs;
    out.push_back(h);
  }
  return out;
}

namespace {

constexpr int kBaseBins = 7;

int base_bin(int k) {
  if (k <= 5) return std::max(k, 1) - 1;
  return k <= 10 ? 5 : 6;
}

std::string bin_label(int first, int last) {
  static const int lower[kBaseBins] = {1, 2, 3, 4, 5, 6, 11};
  static const int upper[kBaseBins] = {1, 2, 3, 4, 5, 10, 0};  // 0: unbounded
  const std::string lo = std::to_string(lower[first]);
  if (upper[last] == 0) return lo + "+";
  if (lower[first] == upper[last]) return lo;
  return lo + "-" + std::to_string(upper[last]);
}

using Table2 = std::vector<std::vector<std::uint64_t>>;

Table2 tabulate(std::span<const int> x, std::span<const int> y, std::span<const int> bin_of,
                std::size_t bins) {
  Table2 t(bins, std::vector<std::uint64_t>(bins, 0));
  for (std::size_t i = 0; i < x.size(); ++i) ++t[bin_of[x[i]]][bin_of[y[i]]];
  return t;
}

double chi2_statistic(const Table2& t) {
  const std::size_t b = t.size();
  std::vector<double> rows(b, 0.0), cols(b, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      rows[i] += t[i][j];
      cols[j] += t[i][j];
      total += t[i][j];
    }
  }
  NeumaierSum s;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double e = rows[i] * cols[j] / total;
      if (e > 0.0) s.add((t[i][j] - e) * (t[i][j] - e) / e);
    }
  }
  return s.value();
}

}  // namespace

JointDegreeTable joint_degree_analysis(const ContactGraph& g, std::uint64_t seed,
                                       int permutations) {
  if (g.edge_count() < 2) throw Error(ErrorCode::TooFewEdges, "joint degree needs two edges");
  JointDegreeTable out;
  std::vector<double> ego, alter;
  std::vector<int> ego_bin, alter_bin;
  ego.reserve(2 * g.edge_count());
  alter.reserve(2 * g.edge_count());
  for (const auto& e : g.edges()) {
    const int du = static_cast<int>(g.degree(e.src));
    const int dv = static_cast<int>(g.degree(e.dst));
    for (auto [a, b] : {std::pair{du, dv}, std::pair{dv, du}}) {
      ++out.cells[{a, b}];
      ego.push_back(a);
      alter.push_back(b);
      ego_bin.push_back(base_bin(a));
      alter_bin.push_back(base_bin(b));
    }
  }
  out.correlation = stats::pearson(ego, alter);
  if (std::isnan(out.correlation)) {
    throw Error(ErrorCode::ZeroVariance, "all edge endpoints share one degree");
  }

  // Greedy pooling of adjacent bins until every expected count reaches 5.
  std::vector<std::vector<int>> groups;  // base bins per pooled bin
  {
    std::vector<std::uint64_t> margin(kBaseBins, 0);
    for (int b : ego_bin) ++margin[b];
    for (int b = 0; b < kBaseBins; ++b) {
      if (margin[b] > 0) groups.push_back({b});
    }
    const double total = static_cast<double>(ego_bin.size());
    auto group_margin = [&](const std::vector<int>& grp) {
      std::uint64_t s = 0;
      for (int b : grp) s += margin[b];
      return s;
    };
    while (groups.size() > 1) {
      std::size_t smallest = 0;
      for (std::size_t i = 1; i < groups.size(); ++i) {
        if (group_margin(groups[i]) < group_margin(groups[smallest])) smallest = i;
      }
      const double min_margin = static_cast<double>(group_margin(groups[smallest]));
      if (min_margin * min_margin / total >= 5.0) break;  // smallest expected cell
      std::size_t partner;
      if (smallest == 0) {
        partner = 1;
      } else if (smallest + 1 == groups.size()) {
        partner = smallest - 1;
      } else {
        partner = group_margin(groups[smallest + 1]) < group_margin(groups[smallest - 1])
                      ? smallest + 1
                      : smallest - 1;
      }
      const std::size_t lo = std::min(smallest, partner);
      const std::size_t hi = std::max(smallest, partner);
      groups[lo].insert(groups[lo].end(), groups[hi].begin(), groups[hi].end());
      groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }
  std::vector<int> pooled(kBaseBins, 0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (int b : groups[gi]) pooled[b] = static_cast<int>(gi);
    const std::string label = bin_label(groups[gi].front(), groups[gi].back());
    out.bins.push_back(label);
  }

  out.binned = tabulate(ego_bin, alter_bin, pooled, groups.size());
  out.chi2_stat = chi2_statistic(out.binned);
  out.chi2_dof = static_cast<int>((groups.size() - 1) * (groups.size() - 1));
  out.chi2_pvalue = stats::chi2_upper_tail(out.chi2_stat, out.chi2_dof);

  out.permutations = permutations;
  if (permutations > 0 && groups.size() > 1) {
    Rng rng(derive_seed(seed, 0, 0x6a6f696e74ULL));
    std::vector<int> shuffled = alter_bin;
    std::uint64_t at_least = 0;
    for (int r = 0; r < permutations; ++r) {
      for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[uniform_below(rng, i + 1)]);
      }
      if (chi2_statistic(tabulate(ego_bin, shuffled, pooled, groups.size())) >=
          out.chi2_stat - 1e-9) {
        ++at_least;
      }
    }
    out.permutation_pvalue =
        static_cast<double>(at_least + 1) / static_cast<double>(permutations + 1);
  } else {
    out.permutation_pvalue = 1.0;
  }
  return out;
}

stats::AnovaResult degree_anova(std::span<const DegreeDistribution> strata) {
  std::vector<std::vector<double>> groups;
  for (const auto& d : strata) {
    std::vector<double> sample;
    for (const auto& [k, c] : d.counts) sample.insert(sample.end(), c, static_cast<double>(k));
    groups.push_back(std::move(sample));
  }
  return stats::one_way_anova(groups);
}

namespace {

std::string fmt_real(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

io::CsvTable k0_scan_csv(const std::vector<ScanEntry>& scan) {
  io::CsvTable t{{"k0", "alpha"}, {}};
  for (const auto& e : scan) {
    t.rows.push_back({std::to_string(e.k0), e.fit ? fmt_real(e.fit->alpha) : ""});
  }
  return t;
}

io::CsvTable hill_scan_csv(const std::vector<HillEstimate>& scan, bool logarithmic) {
  io::CsvTable t{{"m", logarithmic ? "alpha_log" : "alpha_ratio"}, {}};
  for (const auto& h : scan) {
    t.rows.push_back({std::to_string(h.m), fmt_real(logarithmic ? h.alpha_log : h.alpha_ratio)});
  }
  return t;
}

}  // namespace contactnet::degree
