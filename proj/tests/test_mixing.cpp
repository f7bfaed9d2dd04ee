#include <doctest.h>

#include <cmath>
#include <sstream>

#include "contactnet/error.hpp"
#include "contactnet/io.hpp"
#include "contactnet/mixing.hpp"

using namespace contactnet;
using namespace contactnet::mixing;

namespace {

ContactGraph two_triangles() {
  const std::vector<std::pair<std::string, std::string>> e{
      {"a", "b"}, {"b", "c"}, {"a", "c"}, {"d", "e"}, {"e", "f"}, {"d", "f"}, {"c", "d"}};
  return ContactGraph::from_edge_list(e);
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

ContactGraph load(const std::string& v, const std::string& e) {
  std::istringstream vs(v), es(e);
  return io::load_dataset(vs, es, [](const std::string&) {});
}

}  // namespace

TEST_CASE("two triangles joined by a bridge") {
  const auto g = two_triangles();
  const std::vector<int> groups{0, 0, 0, 1, 1, 1};
  const auto mm = mixing_matrix(g, partition_from_assignment(groups));
  CHECK(mm.at(0, 0) == doctest::Approx(3.0 / 7.0));
  CHECK(mm.at(1, 1) == doctest::Approx(3.0 / 7.0));
  CHECK(mm.at(0, 1) == doctest::Approx(1.0 / 14.0));
  CHECK(mm.at(1, 0) == mm.at(0, 1));
  CHECK(modularity(mm) == doctest::Approx(5.0 / 14.0));
  CHECK(assortativity(mm) == doctest::Approx(5.0 / 7.0));
  CHECK(mm.endpoint_counts == std::vector<std::uint64_t>{6, 1, 1, 6});
}

TEST_CASE("one group is degenerate") {
  const auto g = two_triangles();
  const std::vector<int> groups(6, 0);
  const auto mm = mixing_matrix(g, partition_from_assignment(groups));
  CHECK(modularity(mm) == doctest::Approx(0.0));
  CHECK(code_of([&] { assortativity(mm); }) == ErrorCode::DegenerateMatrix);
}

TEST_CASE("mixing errors") {
  const auto g = two_triangles();
  const std::vector<int> partial{0, 0, 0, 1, 1, -1};
  CHECK(code_of([&] { mixing_matrix(g, partition_from_assignment(partial)); }) ==
        ErrorCode::UnassignedVertex);
  const auto empty = ContactGraph::from_edge_list({});
  CHECK(code_of([&] { mixing_matrix(empty, partition_from_assignment({})); }) ==
        ErrorCode::EmptyGraph);
  CHECK(code_of([&] { partition_by(g, Covariate::Region); }) == ErrorCode::MissingCovariate);
}

TEST_CASE("partition by covariate") {
  const auto g = load(
      "id,orientation,age_at_detection,region\n"
      "a,MSM,14,x\nb,F,22,y\nc,HM,,x\nd,MSM,70,\n",
      "src,dst\na,b\nc,d\n");
  const auto o = partition_by(g, Covariate::Orientation);
  CHECK(o.labels == std::vector<std::string>{"woman", "heterosexual_man", "msm"});
  CHECK(o.assignment == std::vector<int>{2, 0, 1, 2});
  const auto age = partition_by(g, Covariate::AgeGroup);
  CHECK(age.labels == std::vector<std::string>{"<15", "[20,25)", "65+", "unknown"});
  const auto region = partition_by(g, Covariate::Region);
  CHECK(region.labels == std::vector<std::string>{"x", "y", "unknown"});
  CHECK(parse_covariate("detection_mode") == Covariate::DetectionMode);
  CHECK_FALSE(parse_covariate("shoe_size").has_value());
}

TEST_CASE("goodness of fit against reference proportions") {
  const std::vector<std::uint64_t> obs{10, 0};
  const std::vector<double> ref{0.5, 0.5};
  const auto r = homogeneity_test(obs, ref);
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(r.dof == 1);
  CHECK(std::abs(r.pvalue - 0.00157) < 1e-4);
  CHECK_FALSE(r.small_expected);

  const std::vector<std::uint64_t> even{5, 5};
  CHECK(homogeneity_test(even, ref).pvalue == doctest::Approx(1.0));

  const std::vector<std::uint64_t> none{0, 0};
  CHECK(code_of([&] { homogeneity_test(none, ref); }) == ErrorCode::EmptyObservation);
}

TEST_CASE("small expected counts add a Monte Carlo p-value") {
  const std::vector<std::uint64_t> obs{4, 0, 0};
  const std::vector<double> ref{0.5, 0.25, 0.25};
  const auto r = homogeneity_test(obs, ref, 9);
  CHECK(r.small_expected);
  REQUIRE(r.monte_carlo_pvalue.has_value());
  // Exact multinomial tail probability by enumeration: 3/16.
  CHECK(std::abs(*r.monte_carlo_pvalue - 0.1875) < 0.015);
  CHECK(homogeneity_test(obs, ref, 9).monte_carlo_pvalue == r.monte_carlo_pvalue);
}

TEST_CASE("zero reference with observations is infinitely atypical") {
  const std::vector<std::uint64_t> obs{3, 1};
  const std::vector<double> ref{1.0, 0.0};
  const auto r = homogeneity_test(obs, ref);
  CHECK(std::isinf(r.statistic));
  CHECK(r.pvalue == 0.0);
}

TEST_CASE("detection lag by ego mode") {
  const auto g = load(
      "id,detection_mode,detection_date\n"
      "a,RANDOM,2001-01-01\nb,CT,2001-01-11\nc,CAPT,2001-01-05\nd,CT,\n",
      "src,dst,named_by\na,b,SRC\nb,c,DST\nc,a,U\nd,a,U\n");
  const auto lag = detection_lag(g);
  CHECK(lag.excluded_edges == 1);
  CHECK(lag.lags == std::vector<int>{10, 6, 4});
  REQUIRE(lag.strata.size() == 3);
  CHECK(lag.strata[0].ego_mode == "random_screening");
  CHECK(lag.strata[0].edges == 1);
  CHECK(lag.strata[0].mean_days == 10.0);
  CHECK(lag.strata[1].ego_mode == "captation");
  CHECK(lag.strata[1].edges == 2);
  CHECK(lag.strata[1].mean_days == 5.0);
  CHECK(lag.strata[2].ego_mode == "all");
  CHECK(lag.strata[2].median_days == 6.0);
}
