#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "contactnet/graph.hpp"

namespace contactnet::io {

using Json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1.0";

/// Receives one message per recoverable oddity (unknown enum label, ignored column).
using WarningSink = std::function<void(const std::string&)>;

/// Parses `vertices.csv` and `edges.csv` tables into a validated graph.
///
/// Only the `id` column is mandatory in the vertex table and `src,dst` in the
/// edge table; every other known column is optional and may appear in any
/// order. Empty cells are missing values. Errors carry the 1-based line number
/// of the offending row (the header is line 1). Without a sink, warnings go to
/// std::clog.
ContactGraph load_dataset(std::istream& vertex_table, std::istream& edge_table,
                          const WarningSink& warn = {});
ContactGraph load_dataset(const std::filesystem::path& vertices,
                          const std::filesystem::path& edges, const WarningSink& warn = {});

void write_vertices(const ContactGraph& g, std::ostream& out);
void write_edges(const ContactGraph& g, std::ostream& out);

/// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

/// Replaces every non-finite number by null. Object members gain a sibling
/// `<key>_nonfinite: true`; arrays holding non-finite entries flag their parent key.
Json encode_nonfinite(const Json& report);

/// Serializes `report` (after encode_nonfinite, with `schema_version` added
/// when absent) through a temporary file renamed into place.
void write_report(const Json& report, const std::filesystem::path& path);
Json read_report(const std::filesystem::path& path);

/// Atomic text write shared by the report, CSV and SVG writers.
void write_text(const std::filesystem::path& path, std::string_view content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

}  // namespace contactnet::io
