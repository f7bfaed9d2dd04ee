#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <regex>

#include "contactnet/error.hpp"
#include "contactnet/layout.hpp"
#include "contactnet/numeric.hpp"

using namespace contactnet;
using namespace contactnet::layout;

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::vector<double> radii(const std::string& svg) {
  std::vector<double> out;
  const std::regex re(R"re(<circle [^>]*r="([0-9.]+)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it) {
    out.push_back(std::stod((*it)[1]));
  }
  return out;
}

}  // namespace

TEST_CASE("two-vertex energy") {
  const EdgeList e{{0, 1}};
  for (double delta : {0.5, 1.0, 2.0}) {
    const std::vector<Point> pos{{0, 0}, {delta, 0}};
    const double expected = 2.0 / 3.0 * delta * delta - 2.0 * delta * delta * std::log(delta);
    CHECK(layout_energy(2, e, pos, delta) == doctest::Approx(expected).epsilon(1e-14));
    const auto g = layout_gradient(2, e, pos, delta);
    CHECK(std::abs(g[0].x) < 1e-12);
    CHECK(std::abs(g[1].y) < 1e-12);
  }
}

TEST_CASE("scaling an edgeless pair") {
  const EdgeList none;
  const double delta = 1.3, t = 2.5;
  const std::vector<Point> a{{0, 0}, {1, 1}};
  const std::vector<Point> b{{0, 0}, {t, t}};
  CHECK(layout_energy(2, none, b, delta) - layout_energy(2, none, a, delta) ==
        doctest::Approx(-2.0 * delta * delta * std::log(t)));
}

TEST_CASE("coincident points are rejected") {
  const std::vector<Point> pos{{1, 1}, {1, 1}};
  CHECK(code_of([&] { layout_energy(2, {}, pos, 1.0); }) == ErrorCode::CoincidentVertices);
  CHECK(code_of([&] { layout_gradient(2, {}, pos, 1.0); }) == ErrorCode::CoincidentVertices);
}

TEST_CASE("repulsion pushes a square apart symmetrically") {
  const std::vector<Point> pos{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  const auto g = layout_gradient(4, {}, pos, 1.0);
  const double magnitude = std::hypot(g[0].x, g[0].y);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::hypot(g[i].x, g[i].y) == doctest::Approx(magnitude));
    // Descent direction -g is parallel to the position vector.
    CHECK(-g[i].x * pos[i].x - g[i].y * pos[i].y ==
          doctest::Approx(magnitude * std::hypot(pos[i].x, pos[i].y)));
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 6;
    EdgeList e;
    for (VertexIndex i = 1; i < n; ++i) e.emplace_back(static_cast<VertexIndex>(uniform_below(rng, i)), i);
    std::vector<Point> pos(n);
    for (auto& p : pos) p = {4.0 * uniform_unit(rng), 4.0 * uniform_unit(rng)};
    const double delta = 0.5 + uniform_unit(rng);
    const auto g = layout_gradient(n, e, pos, delta);
    double diff2 = 0.0, norm2 = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        auto plus = pos, minus = pos;
        (axis == 0 ? plus[i].x : plus[i].y) += h;
        (axis == 0 ? minus[i].x : minus[i].y) -= h;
        const double fd =
            (layout_energy(n, e, plus, delta) - layout_energy(n, e, minus, delta)) / (2.0 * h);
        const double an = axis == 0 ? g[i].x : g[i].y;
        diff2 += (fd - an) * (fd - an);
        norm2 += an * an;
      }
    }
    CHECK(std::sqrt(diff2 / norm2) < 1e-5);
  }
}

TEST_CASE("two connected vertices settle at distance delta") {
  for (double delta : {0.7, 1.0, 3.0}) {
    LayoutConfig cfg;
    cfg.delta = delta;
    cfg.gradient_tolerance = 1e-9;
    const auto r = minimize_layout(2, EdgeList{{0, 1}}, cfg);
    CHECK(r.converged);
    CHECK(std::abs(dist(r.coordinates[0], r.coordinates[1]) - delta) < 1e-3 * delta);
  }
}

TEST_CASE("triangle becomes equilateral and energy never rises") {
  LayoutConfig cfg;
  cfg.seed = 4;
  const auto r = minimize_layout(3, EdgeList{{0, 1}, {1, 2}, {0, 2}}, cfg);
  const auto& c = r.coordinates;
  const double a = dist(c[0], c[1]), b = dist(c[1], c[2]), d = dist(c[0], c[2]);
  CHECK(std::max({a, b, d}) / std::min({a, b, d}) < 1.01);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
    CHECK(r.energy_trace[i] <= r.energy_trace[i - 1]);
  }
  CHECK(r.final_energy <= r.energy_trace.front());
}

TEST_CASE("larger layouts descend monotonically") {
  Rng rng(3);
  EdgeList e;
  for (VertexIndex i = 1; i < 40; ++i) e.emplace_back(static_cast<VertexIndex>(uniform_below(rng, i)), i);
  LayoutConfig cfg;
  cfg.max_iterations = 300;
  const auto r = minimize_layout(40, e, cfg);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) {
    CHECK(r.energy_trace[i] <= r.energy_trace[i - 1]);
  }
  for (const auto& p : r.coordinates) CHECK(std::isfinite(p.x));
}

TEST_CASE("layout preconditions") {
  CHECK(code_of([&] { minimize_layout(3, EdgeList{{0, 1}}, LayoutConfig{}); }) ==
        ErrorCode::NotConnected);
  CHECK(code_of([&] { minimize_layout(1, EdgeList{}, LayoutConfig{}); }) ==
        ErrorCode::InvalidArgument);
  LayoutConfig bad;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("vertex figure") {
  const std::vector<std::pair<std::string, std::string>> e{{"a", "b"}};
  const auto g = ContactGraph::from_edge_list(e);
  const std::vector<Point> pos{{0, 0}, {1, 0}};
  const auto svg = render_vertex_svg(g, pos);
  CHECK(count_of(svg, "<circle") == 2);
  CHECK(count_of(svg, "<line") == 1);
  CHECK(count_of(svg, "fill=\"#4477aa\"") == 2);
  CHECK(svg == render_vertex_svg(g, pos));
  const std::vector<Point> short_pos{{0, 0}};
  CHECK(code_of([&] { render_vertex_svg(g, short_pos); }) == ErrorCode::MissingPositions);
}

TEST_CASE("cluster figure geometry and styles") {
  community::ClusterGraph cg;
  cg.nodes.resize(3);
  cg.nodes[0] = {0, 4, 3, {4, 0, 0, 0}};
  cg.nodes[1] = {1, 1, 0, {0, 1, 0, 0}};
  cg.nodes[2] = {2, 4, 4, {1, 1, 2, 0}};
  cg.links = {{0, 1, 1}, {0, 2, 3}};
  const std::vector<Point> pos{{0, 0}, {1, 0}, {0, 1}};

  const auto pie = render_cluster_svg(cg, pos);
  const auto r = radii(pie);
  REQUIRE(r.size() >= 2);
  CHECK(r[0] / r[1] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(count_of(pie, "stroke-dasharray") == 1);
  CHECK(count_of(pie, "stroke-width=\"3.000\"") == 1);
  CHECK(count_of(pie, "<path") == 3);  // the mixed cluster's sectors

  ClusterFigureOptions opt;
  opt.fill = ClusterFill::PValue;
  opt.pvalues = {1.0, 0.0, 0.01};
  const auto gray = render_cluster_svg(cg, pos, opt);
  const std::regex white(R"(<circle [^>]*fill="#ffffff")"), black(R"(<circle [^>]*fill="#000000")");
  CHECK(std::distance(std::sregex_iterator(gray.begin(), gray.end(), white), std::sregex_iterator()) == 1);
  CHECK(std::distance(std::sregex_iterator(gray.begin(), gray.end(), black), std::sregex_iterator()) == 1);
  CHECK(pvalue_gray(1.0) == 255);
  CHECK(pvalue_gray(0.0) == 0);
  CHECK(pvalue_gray(1e-9) == 0);
  CHECK(pvalue_gray(0.01) == 128);
  CHECK(gray == render_cluster_svg(cg, pos, opt));

  const std::vector<Point> missing{{0, 0}};
  CHECK(code_of([&] { render_cluster_svg(cg, missing); }) == ErrorCode::MissingPositions);
}
