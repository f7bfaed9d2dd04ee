#include "contactnet/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "contactnet/error.hpp"
#include "contactnet/numeric.hpp"
#include "contactnet/stats.hpp"

namespace contactnet::mixing {

std::string_view to_string(Covariate c) {
  switch (c) {
    case Covariate::Orientation: return "orientation";
    case Covariate::DetectionMode: return "detection_mode";
    case Covariate::Region: return "region";
    case Covariate::AgeGroup: return "age_group";
  }
  return "orientation";
}

std::optional<Covariate> parse_covariate(std::string_view name) {
  if (name == "orientation") return Covariate::Orientation;
  if (name == "detection_mode") return Covariate::DetectionMode;
  if (name == "region") return Covariate::Region;
  if (name == "age_group" || name == "age") return Covariate::AgeGroup;
  return std::nullopt;
}

namespace {

constexpr std::string_view kUnknown = "unknown";

std::string age_label(int age) {
  if (age < 15) return "<15";
  if (age >= 65) return "65+";
  const int lo = age - age % 5;
  return "[" + std::to_string(lo) + "," + std::to_string(lo + 5) + ")";
}

// Sort key that keeps age bins in numeric order and "unknown" last.
std::pair<int, std::string> label_key(Covariate c, const std::string& label) {
  if (label == kUnknown) return {1 << 20, label};
  if (c == Covariate::AgeGroup) {
    if (label == "<15") return {0, label};
    if (label == "65+") return {100, label};
    return {std::stoi(label.substr(1)), label};
  }
  return {0, label};
}

}  // namespace

CovariatePartition partition_by(const ContactGraph& g, Covariate covariate) {
  const auto& cols = g.columns();
  const bool present = covariate == Covariate::Orientation     ? cols.orientation
                       : covariate == Covariate::DetectionMode ? cols.detection_mode
                       : covariate == Covariate::Region        ? cols.region
                                                               : cols.age_at_detection;
  if (!present) {
    throw Error(ErrorCode::MissingCovariate, std::string(to_string(covariate)) + " column absent");
  }

  std::vector<std::string> raw(g.vertex_count());
  bool any_value = false;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const auto& rec = g.vertex(v);
    switch (covariate) {
      case Covariate::Orientation:
        raw[v] = display_name(rec.orientation);
        any_value |= rec.orientation != Orientation::Unknown;
        break;
      case Covariate::DetectionMode:
        raw[v] = display_name(rec.detection_mode);
        any_value |= rec.detection_mode != DetectionMode::Unknown;
        break;
      case Covariate::Region:
        raw[v] = rec.region ? *rec.region : std::string(kUnknown);
        any_value |= rec.region.has_value();
        break;
      case Covariate::AgeGroup:
        raw[v] = rec.age_at_detection ? age_label(*rec.age_at_detection) : std::string(kUnknown);
        any_value |= rec.age_at_detection.has_value();
        break;
    }
  }
  if (!any_value) {
    throw Error(ErrorCode::MissingCovariate, std::string(to_string(covariate)) + " has no values");
  }

  CovariatePartition p;
  if (covariate == Covariate::Orientation || covariate == Covariate::DetectionMode) {
    // Enum order, restricted to groups that occur.
    std::vector<std::string> order;
    if (covariate == Covariate::Orientation) {
      for (auto o : {Orientation::Woman, Orientation::HeterosexualMan, Orientation::MSM,
                     Orientation::Unknown}) {
        order.emplace_back(display_name(o));
      }
    } else {
      for (auto d : {DetectionMode::RandomScreening, DetectionMode::ContactTracing,
                     DetectionMode::Captation, DetectionMode::Unknown}) {
        order.emplace_back(display_name(d));
      }
    }
    for (const auto& label : order) {
      if (std::find(raw.begin(), raw.end(), label) != raw.end()) p.labels.push_back(label);
    }
  } else {
    std::vector<std::string> distinct = raw;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::sort(distinct.begin(), distinct.end(), [&](const auto& a, const auto& b) {
      return label_key(covariate, a) < label_key(covariate, b);
    });
    p.labels = std::move(distinct);
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < p.labels.size(); ++i) index[p.labels[i]] = static_cast<int>(i);
  p.assignment.resize(g.vertex_count());
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) p.assignment[v] = index.at(raw[v]);
  return p;
}

CovariatePartition partition_from_assignment(std::span<const int> assignment) {
  CovariatePartition p;
  int top = -1;
  for (int a : assignment) top = std::max(top, a);
  for (int i = 0; i <= top; ++i) p.labels.push_back(std::to_string(i));
  p.assignment.assign(assignment.begin(), assignment.end());
  return p;
}

MixingMatrix mixing_matrix(const ContactGraph& g, const CovariatePartition& p) {
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "mixing matrix needs edges");
  if (p.assignment.size() != g.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "partition size differs from vertex count");
  }
  const std::size_t J = p.group_count();
  MixingMatrix mm;
  mm.groups = J;
  mm.edges = g.edge_count();
  mm.endpoint_counts.assign(J * J, 0);
  for (const auto& e : g.edges()) {
    const int a = p.assignment[e.src];
    const int b = p.assignment[e.dst];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= J || static_cast<std::size_t>(b) >= J) {
      throw Error(ErrorCode::UnassignedVertex,
                  "edge endpoint '" + g.vertex(a < 0 ? e.src : e.dst).id + "' has no group");
    }
    ++mm.endpoint_counts[a * J + b];
    ++mm.endpoint_counts[b * J + a];
  }
  const double twice_m = 2.0 * static_cast<double>(mm.edges);
  mm.fractions.resize(J * J);
  mm.row_sums.assign(J, 0.0);
  for (std::size_t i = 0; i < J; ++i) {
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < J; ++j) {
      mm.fractions[i * J + j] = static_cast<double>(mm.endpoint_counts[i * J + j]) / twice_m;
      row += mm.endpoint_counts[i * J + j];
    }
    mm.row_sums[i] = static_cast<double>(row) / twice_m;
  }
  return mm;
}

namespace {

double squared_norm(const MixingMatrix& mm) {
  NeumaierSum s;
  for (double a : mm.row_sums) s.add(a * a);
  return s.value();
}

}  // namespace

double modularity(const MixingMatrix& mm) {
  NeumaierSum q;
  for (std::size_t i = 0; i < mm.groups; ++i) {
    q.add(mm.at(i, i));
    q.add(-mm.row_sums[i] * mm.row_sums[i]);
  }
  return q.value();
}

double assortativity(const MixingMatrix& mm) {
  const double norm = squared_norm(mm);
  if (norm >= 1.0 - 1e-15) {
    throw Error(ErrorCode::DegenerateMatrix, "||M^2|| = 1: all edge ends in one group");
  }
  return modularity(mm) / (1.0 - norm);
}

io::CsvTable mixing_csv(const MixingMatrix& mm, std::span<const std::string> labels) {
  io::CsvTable t;
  t.header.push_back("group");
  t.header.insert(t.header.end(), labels.begin(), labels.end());
  for (std::size_t i = 0; i < mm.groups; ++i) {
    std::vector<std::string> row{labels[i]};
    for (std::size_t j = 0; j < mm.groups; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.10g", mm.at(i, j));
      row.emplace_back(buf);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

double goodness_of_fit(std::span<const std::uint64_t> observed, std::span<const double> expected) {
  NeumaierSum s;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double o = static_cast<double>(observed[i]);
    if (expected[i] > 0.0) {
      s.add((o - expected[i]) * (o - expected[i]) / expected[i]);
    } else if (observed[i] > 0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return s.value();
}

}  // namespace

HomogeneityResult homogeneity_test(std::span<const std::uint64_t> observed,
                                   std::span<const double> reference, std::uint64_t seed) {
  if (observed.size() != reference.size() || observed.empty()) {
    throw Error(ErrorCode::InvalidArgument, "observed and reference sizes differ");
  }
  std::uint64_t total = 0;
  for (auto o : observed) total += o;
  if (total == 0) throw Error(ErrorCode::EmptyObservation, "no observations");
  NeumaierSum ref_sum;
  int categories = 0;
  for (double r : reference) {
    if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative reference proportion");
    ref_sum.add(r);
    if (r > 0.0) ++categories;
  }
  if (std::abs(ref_sum.value() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "reference proportions must sum to 1");
  }

  HomogeneityResult r;
  r.observed.assign(observed.begin(), observed.end());
  r.expected.resize(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    r.expected[i] = reference[i] * static_cast<double>(total);
    if (reference[i] > 0.0 && r.expected[i] < 5.0) r.small_expected = true;
  }
  r.statistic = goodness_of_fit(observed, r.expected);
  r.dof = std::max(categories - 1, 0);
  // Observations in a category the reference rules out cannot come from it.
  r.pvalue = std::isinf(r.statistic) ? 0.0 : stats::chi2_upper_tail(r.statistic, r.dof);

  if (r.small_expected) {
    std::vector<double> cumulative;
    double acc = 0.0;
    for (double p : reference) cumulative.push_back(acc += p);
    cumulative.back() = 1.0;
    Rng rng(derive_seed(seed, 0, 0x686f6d6fULL));
    std::vector<std::uint64_t> draw(observed.size());
    int at_least = 0;
    for (int rep = 0; rep < kMonteCarloDraws; ++rep) {
      std::fill(draw.begin(), draw.end(), 0);
      for (std::uint64_t i = 0; i < total; ++i) {
        const double u = uniform_unit(rng);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        ++draw[std::min<std::size_t>(it - cumulative.begin(), draw.size() - 1)];
      }
      if (goodness_of_fit(draw, r.expected) >= r.statistic - 1e-9) ++at_least;
    }
    r.monte_carlo_pvalue = static_cast<double>(at_least + 1) / (kMonteCarloDraws + 1);
  }
  return r;
}

DetectionLagReport detection_lag(const ContactGraph& g) {
  if (!g.columns().detection_date) {
    throw Error(ErrorCode::MissingCovariate, "detection_date column absent");
  }
  DetectionLagReport report;
  std::map<DetectionMode, std::vector<double>> by_mode;
  std::vector<double> all;
  for (const auto& e : g.edges()) {
    const auto& a = g.vertex(e.src);
    const auto& b = g.vertex(e.dst);
    if (!a.detection_date || !b.detection_date) {
      ++report.excluded_edges;
      continue;
    }
    const int diff = days_between(*a.detection_date, *b.detection_date);  // b - a
    const VertexRecord* ego = nullptr;
    switch (e.named_by) {
      case NamedBy::Src: ego = &a; break;
      case NamedBy::Dst: ego = &b; break;
      case NamedBy::Both:
      case NamedBy::Unknown: ego = diff > 0 ? &b : &a; break;
    }
    const int lag = std::abs(diff);
    report.lags.push_back(lag);
    by_mode[ego->detection_mode].push_back(lag);
    all.push_back(lag);
  }
  if (all.empty()) {
    throw Error(ErrorCode::MissingCovariate, "no edge has detection dates on both endpoints");
  }
  for (const auto& [mode, lags] : by_mode) {
    report.strata.push_back(
        {std::string(display_name(mode)), lags.size(), stats::mean(lags), stats::median(lags)});
  }
  report.strata.push_back({"all", all.size(), stats::mean(all), stats::median(all)});
  return report;
}

}  // namespace contactnet::mixing
