#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "contactnet/degree_tail.hpp"
#include "contactnet/error.hpp"
#include "contactnet/io.hpp"
#include "contactnet/numeric.hpp"
#include "contactnet/stats.hpp"

using namespace contactnet;
using namespace contactnet::degree;

namespace {

DegreeDistribution power_law(double alpha, int k_lo, int k_hi) {
  std::map<int, double> w;
  for (int k = k_lo; k <= k_hi; ++k) w[k] = std::pow(k, -alpha);
  return DegreeDistribution::from_weights(w);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

ContactGraph star(int leaves) {
  std::vector<std::pair<VertexIndex, VertexIndex>> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, static_cast<VertexIndex>(i));
  return ContactGraph::from_index_edges(static_cast<std::size_t>(leaves) + 1, e);
}

}  // namespace

TEST_CASE("normalizer against closed forms") {
  CHECK(std::abs(power_normalizer(2.0, 1) - std::numbers::pi * std::numbers::pi / 6.0) < 1e-12);
  // Hurwitz zeta values.
  CHECK(std::abs(power_normalizer(3.0, 7) - 0.0117652364929276187) < 1e-13);
  CHECK(std::abs(power_normalizer(2.5, 7) - 0.0400817579336607012) < 1e-13);
  CHECK(power_normalizer(2.0, 1, 3) == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0));
}

TEST_CASE("normalizer agrees with a long direct sum") {
  for (double alpha : {1.5, 2.0, 3.06}) {
    for (int k0 : {1, 7, 50}) {
      NeumaierSum direct;
      for (int k = 1'000'000; k >= k0; --k) direct.add(std::pow(k, -alpha));
      // Remaining tail beyond 10^6 by its integral approximation.
      const double rest = std::pow(1e6 + 0.5, 1.0 - alpha) / (alpha - 1.0);
      CHECK(std::abs(power_normalizer(alpha, k0) - (direct.value() + rest)) < 1e-10);
    }
  }
}

TEST_CASE("observed distribution of a path") {
  const std::vector<std::pair<std::string, std::string>> e{{"a", "b"}, {"b", "c"}};
  const auto d = degree_distribution(ContactGraph::from_edge_list(e), DegreeSource::Observed);
  CHECK(d.n_total == 3);
  CHECK(d.p.at(1) == doctest::Approx(2.0 / 3.0));
  CHECK(d.p.at(2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("declared degrees need the column") {
  const std::vector<std::pair<std::string, std::string>> e{{"a", "b"}};
  const auto g = ContactGraph::from_edge_list(e);
  CHECK(code_of([&] { degree_distribution(g, DegreeSource::Declared); }) ==
        ErrorCode::MissingCovariate);

  std::istringstream v("id,declared_partners\na,\nb,\n"), ed("src,dst\na,b\n");
  const auto h = io::load_dataset(v, ed);
  CHECK(code_of([&] { degree_distribution(h, DegreeSource::Declared); }) ==
        ErrorCode::MissingCovariate);

  std::istringstream v2("id,declared_partners\na,3\nb,\nc,0\n"), e2("src,dst\na,b\n");
  const auto k = io::load_dataset(v2, e2);
  const auto d = degree_distribution(k, DegreeSource::Declared);
  CHECK(d.n_total == 2);
  CHECK(d.excluded == 1);
  CHECK(d.counts.at(0) == 1);
}

TEST_CASE("two-point tail divergence") {
  const auto d = DegreeDistribution::from_weights({{1, 1.0}, {2, 0.125}});
  CHECK(kl_divergence(d, 1, 2.0) == doctest::Approx(0.3029009134188123).epsilon(1e-12));
}

TEST_CASE("divergence vanishes for an exact tail with support normalizer") {
  const auto d = power_law(2.5, 7, 200);
  CHECK(std::abs(kl_divergence(d, 7, 2.5, TailNormalizer::Support)) < 1e-12);
  CHECK(kl_divergence(d, 7, 2.5) > 0.0);
  CHECK(kl_divergence(d, 7, 3.0, TailNormalizer::Support) > 0.0);
}

TEST_CASE("empty tail and bad exponent") {
  const auto d = DegreeDistribution::from_weights({{1, 1.0}, {2, 1.0}});
  CHECK(kl_divergence(d, 5, 2.0) == 0.0);
  CHECK(code_of([&] { fit_alpha(d, 5); }) == ErrorCode::EmptyTail);
  CHECK(code_of([&] { fit_alpha(d, 2); }) == ErrorCode::DegenerateTail);
  CHECK(code_of([&] { kl_divergence(d, 1, 1.0); }) == ErrorCode::AlphaOutOfRange);
}

TEST_CASE("fit recovers a synthetic exponent") {
  const auto d = power_law(2.5, 7, 200);
  const auto fit = fit_alpha(d, 7, TailNormalizer::Support);
  CHECK(std::abs(fit.alpha - 2.5) < 0.01);
  CHECK(fit.tail_mass == doctest::Approx(1.0));
}

TEST_CASE("fit matches a grid search and is a local minimum") {
  const auto d = DegreeDistribution::from_weights(
      {{1, 40.0}, {2, 20.0}, {3, 9.0}, {4, 6.0}, {5, 3.0}, {7, 2.0}, {12, 1.0}, {30, 1.0}});
  for (int k0 : {1, 2, 3}) {
    const auto fit = fit_alpha(d, k0);
    double best_alpha = 0.0, best = 1e300;
    for (double a = 1.001; a <= 8.0; a += 1e-3) {
      const double v = kl_divergence(d, k0, a);
      if (v < best) {
        best = v;
        best_alpha = a;
      }
    }
    CHECK(std::abs(fit.alpha - best_alpha) < 2e-3);
    CHECK(kl_divergence(d, k0, fit.alpha + 1e-3) >= fit.kl_value - 1e-12);
    CHECK(kl_divergence(d, k0, fit.alpha - 1e-3) >= fit.kl_value - 1e-12);
    CHECK(fit.kl_value >= 0.0);
  }
}

TEST_CASE("threshold scan") {
  const auto d = power_law(2.5, 1, 200);
  const auto scan = k0_scan(d, TailNormalizer::Support);
  CHECK(scan.size() == 200);
  double lo = 1e9, hi = -1e9;
  for (const auto& e : scan) {
    if (e.k0 > 100) continue;
    REQUIRE(e.fit.has_value());
    lo = std::min(lo, e.fit->alpha);
    hi = std::max(hi, e.fit->alpha);
  }
  CHECK(hi - lo < 0.05);
  CHECK(scan.back().flag == ErrorCode::DegenerateTail);

  const auto single = DegreeDistribution::from_weights({{4, 1.0}});
  for (const auto& e : k0_scan(single)) {
    CHECK_FALSE(e.fit.has_value());
    CHECK(e.flag.has_value());
  }
}

TEST_CASE("Hill estimator as printed") {
  const std::vector<int> degrees{8, 4, 2, 1};
  const auto d = DegreeDistribution::from_degrees(degrees);
  CHECK(hill_estimator(d, 4).alpha_ratio == doctest::Approx(4.0 / 15.0));
  CHECK(hill_estimator(d, 2).alpha_ratio == doctest::Approx(2.0 / 3.0));
  CHECK(hill_estimator(d, 1).alpha_ratio == 1.0);
  CHECK(hill_estimator(d, 2).alpha_log == doctest::Approx(2.0 / std::log(2.0)));
  CHECK(code_of([&] { hill_estimator(d, 0); }) == ErrorCode::BadM);
  CHECK(code_of([&] { hill_estimator(d, 5); }) == ErrorCode::BadM);

  const std::vector<int> scaled{24, 12, 6, 3};
  const auto ds = DegreeDistribution::from_degrees(scaled);
  for (int m = 1; m <= 4; ++m) {
    CHECK(hill_estimator(ds, m).alpha_ratio == doctest::Approx(hill_estimator(d, m).alpha_ratio));
  }
  const std::vector<int> flat{5, 5, 5, 2};
  CHECK(hill_estimator(DegreeDistribution::from_degrees(flat), 3).alpha_ratio == 1.0);
}

TEST_CASE("Hill scan agrees with pointwise estimates") {
  const std::vector<int> degrees{0, 1, 1, 2, 3, 3, 5, 8, 13, 40};
  const auto d = DegreeDistribution::from_degrees(degrees);
  const auto scan = hill_scan(d);
  REQUIRE(scan.size() == 9);
  for (const auto& h : scan) {
    const auto ref = hill_estimator(d, h.m);
    CHECK(h.alpha_ratio == doctest::Approx(ref.alpha_ratio));
    if (std::isfinite(ref.alpha_log)) CHECK(h.alpha_log == doctest::Approx(ref.alpha_log));
  }
  CHECK(scan.front().alpha_ratio == 1.0);
}

TEST_CASE("Hill log estimator on a Pareto sample") {
  // Survival P(K > k) ~ k^-2.5; a large scale keeps integer rounding small in the top order statistics.
  Rng rng(2024);
  std::vector<int> sample;
  for (int i = 0; i < 40000; ++i) {
    const double u = 1.0 - uniform_unit(rng);
    sample.push_back(static_cast<int>(std::floor(100.0 * std::pow(u, -1.0 / 2.5))));
  }
  const auto scan = hill_scan(DegreeDistribution::from_degrees(sample));
  std::vector<double> plateau;
  for (int m = 200; m <= 2000; m += 100) plateau.push_back(scan[m - 1].alpha_log);
  CHECK(std::abs(stats::median(plateau) - 2.5) < 0.3);
}

TEST_CASE("star graph joint degrees") {
  const auto jt = joint_degree_analysis(star(3), 1, 200);
  CHECK(jt.correlation == doctest::Approx(-1.0));
  CHECK(jt.cells.at({3, 1}) == 3);
  CHECK(jt.cells.at({1, 3}) == 3);
}

TEST_CASE("joint table is symmetric and errors are typed") {
  Rng rng(5);
  std::vector<std::pair<VertexIndex, VertexIndex>> e;
  for (VertexIndex i = 0; i < 60; ++i) {
    for (VertexIndex j = i + 1; j < 60; ++j) {
      if (uniform_unit(rng) < 0.06 + 0.2 * (i < 10 && j < 10)) e.emplace_back(i, j);
    }
  }
  const auto jt = joint_degree_analysis(ContactGraph::from_index_edges(60, e), 3, 500);
  for (const auto& [key, count] : jt.cells) {
    CHECK(jt.cells.at({key.second, key.first}) == count);
  }
  CHECK(jt.correlation >= -1.0);
  CHECK(jt.correlation <= 1.0);
  CHECK(jt.chi2_pvalue >= 0.0);
  CHECK(jt.permutation_pvalue > 0.0);
  CHECK(jt.permutation_pvalue <= 1.0);

  const std::vector<std::pair<VertexIndex, VertexIndex>> cycle{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  CHECK(code_of([&] { joint_degree_analysis(ContactGraph::from_index_edges(4, cycle)); }) ==
        ErrorCode::ZeroVariance);
  const std::vector<std::pair<VertexIndex, VertexIndex>> one{{0, 1}};
  CHECK(code_of([&] { joint_degree_analysis(ContactGraph::from_index_edges(2, one)); }) ==
        ErrorCode::TooFewEdges);
}

TEST_CASE("one-way ANOVA of degrees") {
  const std::vector<int> a{1, 2, 3}, b{4, 5, 6};
  const std::vector<DegreeDistribution> strata{DegreeDistribution::from_degrees(a),
                                               DegreeDistribution::from_degrees(b)};
  const auto r = degree_anova(strata);
  CHECK(r.f_statistic == doctest::Approx(13.5));
  CHECK(r.df_between == 1);
  CHECK(r.df_within == 4);
  CHECK(r.pvalue == doctest::Approx(0.02131164112875672).epsilon(1e-9));
}

TEST_CASE("chi-square tail and correlation kernels") {
  CHECK(stats::chi2_upper_tail(10.0, 1) == doctest::Approx(0.001565402258002549).epsilon(1e-10));
  CHECK(stats::chi2_upper_tail(0.0, 3) == 1.0);
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6}, z{1, 1, 1};
  CHECK(stats::pearson(x, y) == doctest::Approx(1.0));
  CHECK(std::isnan(stats::pearson(x, z)));
}
