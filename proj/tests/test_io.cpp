#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "contactnet/error.hpp"
#include "contactnet/io.hpp"

using namespace contactnet;

namespace {

ContactGraph load(const std::string& vertices, const std::string& edges,
                  std::vector<std::string>* warnings = nullptr) {
  std::istringstream v(vertices), e(edges);
  return io::load_dataset(v, e, [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  });
}

ErrorCode code_of(const std::string& vertices, const std::string& edges,
                  std::optional<std::size_t>* row = nullptr) {
  try {
    load(vertices, edges);
  } catch (const Error& err) {
    if (row) *row = err.row();
    return err.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("minimal tables load") {
  const auto g = load("id\na\nb\nc\n", "src,dst\na,b\nb,c\n");
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK_FALSE(g.columns().orientation);
  CHECK(g.degree(*g.find("b")) == 2);
}

TEST_CASE("columns in any order, CRLF, BOM and blank lines") {
  const std::string v =
      "\xEF\xBB\xBFregion,declared_partners,id,orientation\r\n"
      "east,3,a,F\r\n\r\nwest,,b,MSM\r\n";
  const auto g = load(v, "dst,src,named_by\r\nb,a,SRC\r\n");
  REQUIRE(g.vertex_count() == 2);
  CHECK(g.vertex(0).region == "east");
  CHECK(g.vertex(0).declared_partners == 3);
  CHECK_FALSE(g.vertex(1).declared_partners.has_value());
  CHECK(g.vertex(1).orientation == Orientation::MSM);
  CHECK(g.edges()[0].named_by == NamedBy::Src);
  CHECK(g.vertex(g.edges()[0].src).id == "a");
}

TEST_CASE("quoted fields") {
  const auto fields = io::split_csv_line(R"(a,"b,c","say ""hi""",)");
  REQUIRE(fields.size() == 4);
  CHECK(fields[1] == "b,c");
  CHECK(fields[2] == "say \"hi\"");
  CHECK(fields[3].empty());
  CHECK(io::csv_escape("x,y") == "\"x,y\"");
  CHECK(io::csv_escape("plain") == "plain");
}

TEST_CASE("unknown labels and columns warn") {
  std::vector<std::string> warnings;
  const auto g = load("id,orientation,shoe_size\na,Z,40\nb,HM,41\n", "src,dst\na,b\n", &warnings);
  CHECK(g.vertex(0).orientation == Orientation::Unknown);
  CHECK(warnings.size() == 2);
}

TEST_CASE("ingestion errors carry file line numbers") {
  std::optional<std::size_t> row;
  CHECK(code_of("id\na\na\n", "src,dst\n", &row) == ErrorCode::DuplicateVertexId);
  CHECK(row == 3u);
  CHECK(code_of("id\na\nb\n", "src,dst\na,b\nb,a\n", &row) == ErrorCode::DuplicateEdge);
  CHECK(row == 3u);
  CHECK(code_of("id\na\n", "src,dst\na,a\n", &row) == ErrorCode::SelfLoop);
  CHECK(row == 2u);
  CHECK(code_of("id\na\n", "src,dst\na,z\n", &row) == ErrorCode::DanglingEndpoint);
  CHECK(code_of("id,age_at_detection\na,old\n", "src,dst\n") == ErrorCode::MalformedRow);
  CHECK(code_of("id,detection_date\na,2001-02-30\n", "src,dst\n") == ErrorCode::MalformedRow);
  CHECK(code_of("name\na\n", "src,dst\n") == ErrorCode::MalformedRow);
}

TEST_CASE("write and reload round trip") {
  const std::string v =
      "id,orientation,detection_mode,detection_date,age_at_detection,region,declared_partners\n"
      "a,F,CT,2003-04-05,31,\"north, upper\",2\n"
      "b,HM,RANDOM,,,,\n";
  const auto g = load(v, "src,dst,named_by\na,b,BOTH\n");
  std::ostringstream vo, eo;
  io::write_vertices(g, vo);
  io::write_edges(g, eo);
  const auto h = load(vo.str(), eo.str());
  CHECK(std::equal(g.vertices().begin(), g.vertices().end(), h.vertices().begin(),
                   h.vertices().end()));
  CHECK(g.edge_records() == h.edge_records());
}

TEST_CASE("non-finite values become null with a flag") {
  io::Json r{{"q", std::numeric_limits<double>::quiet_NaN()},
             {"ok", 1.5},
             {"nested", {{"inf", std::numeric_limits<double>::infinity()}}},
             {"list", {1.0, std::numeric_limits<double>::infinity()}}};
  const auto enc = io::encode_nonfinite(r);
  CHECK(enc["q"].is_null());
  CHECK(enc["q_nonfinite"] == true);
  CHECK(enc["ok"] == 1.5);
  CHECK(enc["nested"]["inf"].is_null());
  CHECK(enc["nested"]["inf_nonfinite"] == true);
  CHECK(enc["list"][1].is_null());
  CHECK(enc["list_nonfinite"] == true);
}

TEST_CASE("report round trip adds schema version") {
  const auto dir = std::filesystem::temp_directory_path() / "contactnet_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "report.json";
  io::write_report(io::Json{{"value", 0.25}, {"name", "x"}}, path);
  const auto back = io::read_report(path);
  CHECK(back["schema_version"] == std::string(io::kSchemaVersion));
  CHECK(back["value"] == 0.25);
  CHECK(back["name"] == "x");
  std::filesystem::remove_all(dir);
}

TEST_CASE("fixture dataset loads") {
  const auto g = io::load_dataset(std::filesystem::path(FIXTURE_DIR) / "vertices.csv",
                                  std::filesystem::path(FIXTURE_DIR) / "edges.csv");
  CHECK(g.vertex_count() == 45);
  CHECK(g.edge_count() == 64);
  CHECK(g.columns().declared_partners);
  CHECK(g.columns().named_by);
}

TEST_CASE("missing file is an io failure") {
  CHECK_THROWS_AS(io::load_dataset("/nonexistent/v.csv", "/nonexistent/e.csv"), Error);
}
