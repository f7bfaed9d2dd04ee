#include "contactnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "contactnet/error.hpp"

namespace contactnet::io {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string CsvTable::to_string() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_escape(row[i]);
    }
    out.push_back('\n');
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

namespace {

struct Row {
  std::size_t line{0};
  std::vector<std::string> cells;
};

struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<Row> rows;
};

Table read_table(std::istream& in, std::string_view what) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      auto names = split_csv_line(line);
      width = names.size();
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (!table.columns.emplace(names[i], i).second) {
          throw Error(ErrorCode::MalformedRow,
                      std::string(what) + ": duplicate column '" + names[i] + "'", line_no);
        }
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != width) {
      throw Error(ErrorCode::MalformedRow,
                  std::string(what) + ": expected " + std::to_string(width) + " fields, got " +
                      std::to_string(cells.size()),
                  line_no);
    }
    table.rows.push_back({line_no, std::move(cells)});
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, std::string(what) + ": read failure");
  if (!have_header) throw Error(ErrorCode::MalformedRow, std::string(what) + ": missing header", 1);
  return table;
}

class Cells {
 public:
  Cells(const Table& t, const Row& r) : table_(t), row_(r) {}

  std::optional<std::string_view> get(const std::string& column) const {
    auto it = table_.columns.find(column);
    if (it == table_.columns.end()) return std::nullopt;
    const auto& cell = row_.cells[it->second];
    if (cell.empty()) return std::nullopt;
    return std::string_view(cell);
  }

  std::optional<int> get_count(const std::string& column) const {
    auto text = get(column);
    if (!text) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc{} || ptr != text->data() + text->size() || value < 0) {
      throw Error(ErrorCode::MalformedRow,
                  column + ": expected a non-negative integer, got '" + std::string(*text) + "'",
                  row_.line);
    }
    return value;
  }

 private:
  const Table& table_;
  const Row& row_;
};

void require_column(const Table& t, const std::string& name, std::string_view what) {
  if (!t.columns.count(name)) {
    throw Error(ErrorCode::MalformedRow,
                std::string(what) + ": header lacks required column '" + name + "'", 1);
  }
}

template <typename Enum, typename Parser>
Enum parse_enum(const Cells& cells, const std::string& column, Parser parse, Enum fallback,
                std::size_t line, const WarningSink& warn) {
  auto text = cells.get(column);
  if (!text) return fallback;
  if (auto value = parse(*text)) return *value;
  warn("line " + std::to_string(line) + ": unknown " + column + " label '" + std::string(*text) +
       "' mapped to U");
  return fallback;
}

}  // namespace

ContactGraph load_dataset(std::istream& vertex_table, std::istream& edge_table,
                          const WarningSink& warn_in) {
  WarningSink warn = warn_in ? warn_in : [](const std::string& msg) {
    std::clog << "warning: " << msg << '\n';
  };

  static const std::vector<std::string> kVertexColumns = {
      "id", "orientation", "detection_mode", "detection_date", "age_at_detection", "region",
      "declared_partners"};
  static const std::vector<std::string> kEdgeColumns = {"src", "dst", "named_by"};

  const Table vt = read_table(vertex_table, "vertices");
  require_column(vt, "id", "vertices");
  for (const auto& [name, _] : vt.columns) {
    if (std::find(kVertexColumns.begin(), kVertexColumns.end(), name) == kVertexColumns.end()) {
      warn("vertices: ignoring unknown column '" + name + "'");
    }
  }

  CovariateColumns columns;
  columns.orientation = vt.columns.count("orientation") > 0;
  columns.detection_mode = vt.columns.count("detection_mode") > 0;
  columns.detection_date = vt.columns.count("detection_date") > 0;
  columns.age_at_detection = vt.columns.count("age_at_detection") > 0;
  columns.region = vt.columns.count("region") > 0;
  columns.declared_partners = vt.columns.count("declared_partners") > 0;

  std::vector<VertexRecord> vertices;
  std::vector<std::size_t> vertex_lines;
  vertices.reserve(vt.rows.size());
  for (const auto& row : vt.rows) {
    Cells cells(vt, row);
    VertexRecord v;
    auto id = cells.get("id");
    if (!id) throw Error(ErrorCode::MalformedRow, "vertices: empty id", row.line);
    v.id = std::string(*id);
    v.orientation = parse_enum(cells, "orientation", parse_orientation, Orientation::Unknown,
                               row.line, warn);
    v.detection_mode = parse_enum(cells, "detection_mode", parse_detection_mode,
                                  DetectionMode::Unknown, row.line, warn);
    if (auto text = cells.get("detection_date")) {
      v.detection_date = parse_date(*text);
      if (!v.detection_date) {
        throw Error(ErrorCode::MalformedRow,
                    "detection_date: expected YYYY-MM-DD, got '" + std::string(*text) + "'",
                    row.line);
      }
    }
    v.age_at_detection = cells.get_count("age_at_detection");
    if (auto region = cells.get("region")) v.region = std::string(*region);
    v.declared_partners = cells.get_count("declared_partners");
    vertices.push_back(std::move(v));
    vertex_lines.push_back(row.line);
  }

  const Table et = read_table(edge_table, "edges");
  require_column(et, "src", "edges");
  require_column(et, "dst", "edges");
  for (const auto& [name, _] : et.columns) {
    if (std::find(kEdgeColumns.begin(), kEdgeColumns.end(), name) == kEdgeColumns.end()) {
      warn("edges: ignoring unknown column '" + name + "'");
    }
  }
  columns.named_by = et.columns.count("named_by") > 0;

  std::vector<EdgeRecord> edges;
  std::vector<std::size_t> edge_lines;
  edges.reserve(et.rows.size());
  for (const auto& row : et.rows) {
    Cells cells(et, row);
    auto src = cells.get("src");
    auto dst = cells.get("dst");
    if (!src || !dst) throw Error(ErrorCode::MalformedRow, "edges: empty endpoint", row.line);
    EdgeRecord e{std::string(*src), std::string(*dst), NamedBy::Unknown};
    e.named_by = parse_enum(cells, "named_by", parse_named_by, NamedBy::Unknown, row.line, warn);
    edges.push_back(std::move(e));
    edge_lines.push_back(row.line);
  }

  // The constructor reports 1-based record numbers; translate them to file lines.
  try {
    return ContactGraph(std::move(vertices), std::move(edges), columns);
  } catch (const Error& e) {
    if (!e.row()) throw;
    const bool vertex_error = e.code() == ErrorCode::DuplicateVertexId ||
                              (e.code() == ErrorCode::MalformedRow);
    const auto& lines = vertex_error ? vertex_lines : edge_lines;
    const std::size_t record = *e.row();
    std::string message = e.what();
    if (auto pos = message.find(": "); pos != std::string::npos) message.erase(0, pos + 2);
    throw Error(e.code(), (vertex_error ? "vertices: " : "edges: ") + message,
                record >= 1 && record <= lines.size() ? lines[record - 1] : record);
  }
}

ContactGraph load_dataset(const fs::path& vertices, const fs::path& edges,
                          const WarningSink& warn) {
  std::ifstream vin(vertices);
  if (!vin) throw Error(ErrorCode::IoFailure, "cannot open " + vertices.string());
  std::ifstream ein(edges);
  if (!ein) throw Error(ErrorCode::IoFailure, "cannot open " + edges.string());
  return load_dataset(vin, ein, warn);
}

void write_vertices(const ContactGraph& g, std::ostream& out) {
  out << "id,orientation,detection_mode,detection_date,age_at_detection,region,"
         "declared_partners\n";
  for (const auto& v : g.vertices()) {
    out << csv_escape(v.id) << ',' << to_label(v.orientation) << ','
        << to_label(v.detection_mode) << ','
        << (v.detection_date ? format_date(*v.detection_date) : "") << ',';
    if (v.age_at_detection) out << *v.age_at_detection;
    out << ',' << (v.region ? csv_escape(*v.region) : "") << ',';
    if (v.declared_partners) out << *v.declared_partners;
    out << '\n';
  }
}

void write_edges(const ContactGraph& g, std::ostream& out) {
  out << "src,dst,named_by\n";
  for (const auto& e : g.edges()) {
    out << csv_escape(g.vertex(e.src).id) << ',' << csv_escape(g.vertex(e.dst).id) << ','
        << to_label(e.named_by) << '\n';
  }
}

namespace {

bool is_nonfinite(const Json& j) {
  return j.is_number_float() && !std::isfinite(j.get<double>());
}

// Returns true when `j` was (or contained, for arrays) a non-finite number.
bool scrub(Json& j) {
  if (is_nonfinite(j)) {
    j = nullptr;
    return true;
  }
  if (j.is_array()) {
    bool any = false;
    for (auto& item : j) {
      if (is_nonfinite(item)) {
        item = nullptr;
        any = true;
      } else {
        scrub(item);
      }
    }
    return any;
  }
  if (j.is_object()) {
    std::vector<std::string> flagged;
    for (auto& [key, value] : j.items()) {
      if (scrub(value)) flagged.push_back(key);
    }
    for (const auto& key : flagged) j[key + "_nonfinite"] = true;
  }
  return false;
}

}  // namespace

Json encode_nonfinite(const Json& report) {
  Json copy = report;
  if (scrub(copy)) copy = nullptr;
  return copy;
}

void write_text(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot rename into " + path.string());
  }
}

void write_report(const Json& report, const fs::path& path) {
  Json doc = report.is_null() ? Json::object() : report;
  if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "report must be a JSON object");
  doc = encode_nonfinite(doc);
  if (!doc.contains("schema_version")) doc["schema_version"] = std::string(kSchemaVersion);
  write_text(path, doc.dump(2) + "\n");
}

Json read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
  }
}

}  // namespace contactnet::io
