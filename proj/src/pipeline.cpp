#include "contactnet/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "contactnet/community.hpp"
#include "contactnet/error.hpp"
#include "contactnet/layout.hpp"
#include "contactnet/nullmodel.hpp"
#include "contactnet/numeric.hpp"
#include "contactnet/stats.hpp"

namespace contactnet::pipeline {

using io::Json;

namespace {

// Substream tags; every random draw in a run descends from cfg.seed through one of these.
constexpr std::uint64_t kJointTag = 0x6a6f696e;
constexpr std::uint64_t kClusterTag = 0x636c7374;
constexpr std::uint64_t kNullTag = 0x6e756c6c;
constexpr std::uint64_t kSubclusterTag = 0x73756263;
constexpr std::uint64_t kAtypicalTag = 0x61747970;
constexpr std::uint64_t kLayoutTag = 0x6c61796f;

constexpr mixing::Covariate kAllCovariates[] = {
    mixing::Covariate::Orientation, mixing::Covariate::DetectionMode, mixing::Covariate::Region,
    mixing::Covariate::AgeGroup};

Error config_error(const std::string& msg) { return Error(ErrorCode::InvalidArgument, msg); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw config_error(key + ": not a number: " + text);
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw config_error(key + ": expected true or false, got " + text);
}

// Strips a trailing '#' comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<std::string> parse_list(const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw config_error("unterminated array: " + text);
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(body);
  for (std::string item; std::getline(ss, item, ',');) {
    item = unquote(trim(item));
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

mixing::Covariate covariate_named(const std::string& name) {
  const auto c = mixing::parse_covariate(name);
  if (!c) throw config_error("unknown covariate: " + name);
  return *c;
}

bool column_present(const ContactGraph& g, mixing::Covariate c) {
  const auto& cols = g.columns();
  switch (c) {
    case mixing::Covariate::Orientation: return cols.orientation;
    case mixing::Covariate::DetectionMode: return cols.detection_mode;
    case mixing::Covariate::Region: return cols.region;
    case mixing::Covariate::AgeGroup: return cols.age_at_detection;
  }
  return false;
}

std::vector<mixing::Covariate> selected_covariates(const PipelineConfig& cfg,
                                                   const ContactGraph& g) {
  if (!cfg.covariates.empty()) return cfg.covariates;
  std::vector<mixing::Covariate> out;
  for (auto c : kAllCovariates) {
    if (column_present(g, c)) out.push_back(c);
  }
  return out;
}

Json error_json(const Error& e) {
  return Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

Json base_report(const PipelineConfig& cfg, const Dataset& data, std::string_view command) {
  Json r;
  r["schema_version"] = std::string(io::kSchemaVersion);
  r["command"] = std::string(command);
  r["config"] = cfg.to_json();
  r["warnings"] = data.warnings;
  return r;
}

std::filesystem::path finish(const PipelineConfig& cfg, const std::string& name, const Json& r) {
  std::filesystem::create_directories(cfg.out);
  const auto path = cfg.out / (name + ".json");
  io::write_report(r, path);
  return path;
}

void write_csv(const PipelineConfig& cfg, const std::string& file, const io::CsvTable& t) {
  std::filesystem::create_directories(cfg.out);
  io::write_text(cfg.out / file, t.to_string());
}

Json geodesic_json(const GeodesicSummary& s) {
  Json hist = Json::object();
  for (const auto& [d, count] : s.histogram) hist[std::to_string(d)] = count;
  return Json{{"vertices", s.vertex_count},
              {"oriented", s.oriented},
              {"mean_L", s.mean_L},
              {"mean_L_conventional", s.mean_L_conventional},
              {"harmonic_mean", s.harmonic_mean},
              {"diameter", s.diameter},
              {"reachable_pairs", s.reachable_pairs},
              {"histogram", hist}};
}

Json fit_json(const degree::PowerLawFit& f) {
  return Json{{"k0", f.k0},
              {"alpha", f.alpha},
              {"kl", f.kl_value},
              {"tail_mass", f.tail_mass},
              {"normalizer", f.normalizer}};
}

std::string slug(std::string_view name) {
  std::string out(name);
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out;
}

// Positions for the quotient graph; a single cluster sits at the origin.
std::vector<layout::Point> cluster_positions(const community::ClusterGraph& cg,
                                             const PipelineConfig& cfg, Json& info) {
  if (cg.nodes.size() < 2) {
    info = Json{{"converged", true}, {"final_energy", 0.0}, {"iterations", 0}};
    return std::vector<layout::Point>(cg.nodes.size());
  }
  const auto q = community::quotient_graph(cg);
  layout::LayoutConfig lc;
  lc.delta = cfg.layout_delta;
  lc.max_iterations = cfg.layout_iterations;
  lc.seed = derive_seed(cfg.seed, 1, kLayoutTag);
  const auto pos = layout::minimize_layout(q, lc);
  info = Json{{"converged", pos.converged},
              {"final_energy", pos.final_energy},
              {"iterations", pos.iterations}};
  return pos.coordinates;
}

}  // namespace

void PipelineConfig::validate() const {
  if (vertices.empty() || edges.empty()) throw config_error("--vertices and --edges are required");
  if (out.empty()) throw config_error("output directory must not be empty");
  if (seed == 0) throw config_error("seed must be positive");
  if (replicates < 1) throw config_error("replicates must be positive");
  if (restarts < 1) throw config_error("restarts must be positive");
  if (permutations < 1) throw config_error("permutations must be positive");
  if (!(layout_delta > 0.0) || !std::isfinite(layout_delta)) {
    throw config_error("layout_delta must be positive");
  }
  if (layout_iterations < 0) throw config_error("layout_iterations must not be negative");
}

Json PipelineConfig::to_json() const {
  std::vector<std::string> names;
  for (auto c : covariates) names.emplace_back(mixing::to_string(c));
  return Json{{"vertices", vertices.generic_string()},
              {"edges", edges.generic_string()},
              {"out", out.generic_string()},
              {"seed", seed},
              {"replicates", replicates},
              {"restarts", restarts},
              {"covariates", names},
              {"oriented", oriented},
              {"degree_source", std::string(degree::to_string(degree_source))},
              {"permutations", permutations},
              {"layout_delta", layout_delta},
              {"layout_iterations", layout_iterations}};
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  std::stringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty() || line.front() == '[') continue;  // blank, comment, or table header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw_value = trim(line.substr(eq + 1));
    const std::string value = unquote(raw_value);
    if (key == "vertices") {
      cfg.vertices = value;
    } else if (key == "edges") {
      cfg.edges = value;
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "replicates") {
      cfg.replicates = parse_number<int>(key, value);
    } else if (key == "restarts") {
      cfg.restarts = parse_number<int>(key, value);
    } else if (key == "permutations") {
      cfg.permutations = parse_number<int>(key, value);
    } else if (key == "layout_iterations") {
      cfg.layout_iterations = parse_number<int>(key, value);
    } else if (key == "layout_delta") {
      cfg.layout_delta = parse_number<double>(key, value);
    } else if (key == "oriented") {
      cfg.oriented = parse_bool(key, value);
    } else if (key == "degree_source") {
      if (value == "declared") {
        cfg.degree_source = degree::DegreeSource::Declared;
      } else if (value == "observed") {
        cfg.degree_source = degree::DegreeSource::Observed;
      } else {
        throw config_error("degree_source must be declared or observed");
      }
    } else if (key == "covariate" || key == "covariates") {
      cfg.covariates.clear();
      for (const auto& name : parse_list(raw_value)) cfg.covariates.push_back(covariate_named(name));
    } else {
      throw config_error("config line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

Dataset load(const PipelineConfig& cfg) {
  Dataset d;
  d.graph = io::load_dataset(cfg.vertices, cfg.edges,
                             [&](const std::string& w) { d.warnings.push_back(w); });
  return d;
}

Json run_summary(const PipelineConfig& cfg, const Dataset& data) {
  const auto& g = data.graph;
  Json r = base_report(cfg, data, "summary");
  const auto n = g.vertex_count();
  r["vertices"] = n;
  r["edges"] = g.edge_count();

  auto share = [&](std::size_t count) {
    return n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
  };
  if (g.columns().orientation) {
    std::array<std::size_t, kOrientationCount> counts{};
    for (const auto& v : g.vertices()) ++counts[static_cast<std::size_t>(v.orientation)];
    Json j = Json::object();
    for (int o = 0; o < kOrientationCount; ++o) {
      j[std::string(display_name(static_cast<Orientation>(o)))] =
          Json{{"count", counts[o]}, {"share", share(counts[o])}};
    }
    r["orientation"] = j;
  }
  if (g.columns().detection_mode) {
    std::array<std::size_t, kDetectionModeCount> counts{};
    for (const auto& v : g.vertices()) ++counts[static_cast<std::size_t>(v.detection_mode)];
    Json j = Json::object();
    for (int m = 0; m < kDetectionModeCount; ++m) {
      j[std::string(display_name(static_cast<DetectionMode>(m)))] =
          Json{{"count", counts[m]}, {"share", share(counts[m])}};
    }
    r["detection_mode"] = j;
  }
  if (g.columns().region) {
    std::map<std::string, std::size_t> counts;
    for (const auto& v : g.vertices()) ++counts[v.region.value_or("unknown")];
    Json j = Json::object();
    for (const auto& [region, count] : counts) {
      j[region] = Json{{"count", count}, {"share", share(count)}};
    }
    r["region"] = j;
  }

  std::size_t isolated = 0;
  for (VertexIndex v = 0; v < n; ++v) isolated += g.degree(v) == 0 ? 1 : 0;
  r["isolated_vertices"] = isolated;

  const auto comps = connected_components(g);
  std::map<std::size_t, std::size_t> size_census;
  for (auto s : comps.sizes) ++size_census[s];
  Json census = Json::array();
  for (auto it = size_census.rbegin(); it != size_census.rend(); ++it) {
    census.push_back(Json{{"size", it->first}, {"components", it->second}});
  }
  Json components{{"count", comps.sizes.size()}, {"census", census}};
  if (n > 0) {
    const auto giant = giant_component(g);
    components["giant_vertices"] = giant.vertex_count();
    components["giant_edges"] = giant.edge_count();
  }
  r["components"] = components;
  finish(cfg, "summary", r);
  return r;
}

Json run_degrees(const PipelineConfig& cfg, const Dataset& data) {
  const auto& g = data.graph;
  Json r = base_report(cfg, data, "degrees");
  r["degree_source"] = std::string(degree::to_string(cfg.degree_source));

  struct Stratum {
    std::string name;
    std::optional<Orientation> orientation;
  };
  const Stratum strata[] = {{"pooled", std::nullopt},
                            {"woman", Orientation::Woman},
                            {"heterosexual_man", Orientation::HeterosexualMan},
                            {"msm", Orientation::MSM}};
  Json out = Json::object();
  for (const auto& s : strata) {
    Json j;
    try {
      if (s.orientation && !g.columns().orientation) {
        throw Error(ErrorCode::MissingCovariate, "orientation column absent");
      }
      degree::VertexFilter keep;
      if (s.orientation) {
        keep = [o = *s.orientation](const VertexRecord& v) { return v.orientation == o; };
      }
      const auto d = degree::degree_distribution(g, cfg.degree_source, keep);
      j["vertices"] = d.n_total;
      j["excluded"] = d.excluded;
      j["zero_degree"] = d.counts.contains(0) ? d.counts.at(0) : 0;
      Json counts = Json::object();
      for (const auto& [k, c] : d.counts) counts[std::to_string(k)] = c;
      j["counts"] = counts;

      const auto scan = degree::k0_scan(d);
      Json scan_json = Json::array();
      for (const auto& e : scan) {
        if (e.fit) {
          scan_json.push_back(fit_json(*e.fit));
        } else {
          scan_json.push_back(Json{{"k0", e.k0}, {"flag", std::string(to_string(*e.flag))}});
        }
      }
      j["k0_scan"] = scan_json;
      write_csv(cfg, "k0_scan_" + s.name + ".csv", degree::k0_scan_csv(scan));
      if (d.positive_degrees_descending().size() >= 2) {
        const auto hill = degree::hill_scan(d);
        write_csv(cfg, "hill_" + s.name + ".csv", degree::hill_scan_csv(hill, false));
        write_csv(cfg, "hill_log_" + s.name + ".csv", degree::hill_scan_csv(hill, true));
        j["hill_sidecars"] = {"hill_" + s.name + ".csv", "hill_log_" + s.name + ".csv"};
      } else {
        j["hill_note"] = "fewer than two positive degrees";
      }
    } catch (const Error& e) {
      j = error_json(e);
    }
    out[s.name] = j;
  }
  r["strata"] = out;

  try {
    const auto jt = degree::joint_degree_analysis(g, derive_seed(cfg.seed, 0, kJointTag),
                                                  cfg.permutations);
    r["joint_degree"] = Json{{"correlation", jt.correlation},
                             {"bins", jt.bins},
                             {"binned", jt.binned},
                             {"chi2_statistic", jt.chi2_stat},
                             {"chi2_dof", jt.chi2_dof},
                             {"chi2_pvalue", jt.chi2_pvalue},
                             {"permutation_pvalue", jt.permutation_pvalue},
                             {"permutations", jt.permutations}};
    io::CsvTable cells{{"ego_degree", "alter_degree", "count"}, {}};
    for (const auto& [key, count] : jt.cells) {
      cells.rows.push_back(
          {std::to_string(key.first), std::to_string(key.second), std::to_string(count)});
    }
    write_csv(cfg, "joint_degree.csv", cells);
  } catch (const Error& e) {
    r["joint_degree"] = error_json(e);
  }

  Json anova = Json::object();
  for (auto c : selected_covariates(cfg, g)) {
    const std::string name(mixing::to_string(c));
    try {
      const auto part = mixing::partition_by(g, c);
      std::vector<degree::DegreeDistribution> groups;
      for (std::size_t k = 0; k < part.group_count(); ++k) {
        groups.push_back(degree::degree_distribution(g, cfg.degree_source,
            [&, k](const VertexRecord& v) {
              return part.assignment[*g.find(v.id)] == static_cast<int>(k);
            }));
      }
      const auto a = degree::degree_anova(groups);
      anova[name] = Json{{"groups", part.labels},
                         {"f_statistic", a.f_statistic},
                         {"df_between", a.df_between},
                         {"df_within", a.df_within},
                         {"pvalue", a.pvalue}};
    } catch (const Error& e) {
      anova[name] = error_json(e);
    }
  }
  r["anova"] = anova;
  finish(cfg, "degrees", r);
  return r;
}

Json run_structure(const PipelineConfig& cfg, const Dataset& data) {
  const auto& g = data.graph;
  Json r = base_report(cfg, data, "structure");
  if (g.vertex_count() == 0) throw Error(ErrorCode::EmptyGraph, "no vertices");
  const auto giant = giant_component(g);
  r["giant_vertices"] = giant.vertex_count();
  r["giant_edges"] = giant.edge_count();

  Json geo{{"unoriented", geodesic_json(geodesic_summary(giant, false))}};
  if (cfg.oriented) {
    if (g.columns().named_by) {
      geo["oriented"] = geodesic_json(geodesic_summary(giant, true));
    } else {
      geo["oriented"] = error_json(Error(ErrorCode::MissingCovariate, "named_by column absent"));
    }
  }
  r["geodesics"] = geo;

  const auto cut = articulation_points(g);
  r["articulation_points"] = Json{{"count", cut.size()}, {"ids", cut}};
  try {
    r["clustering"] = Json{{"triangles", triangle_count(g)},
                           {"coefficient", clustering_coefficient(g)}};
  } catch (const Error& e) {
    r["clustering"] = error_json(e);
  }

  const auto cliques = maximal_cliques(g);
  std::map<std::size_t, std::size_t> by_size;
  io::CsvTable clique_csv{{"clique", "size", "members"}, {}};
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    ++by_size[cliques[i].size()];
    std::string members;
    for (const auto& id : cliques[i]) members += (members.empty() ? "" : " ") + id;
    clique_csv.rows.push_back({std::to_string(i), std::to_string(cliques[i].size()), members});
  }
  Json clique_sizes = Json::object();
  for (const auto& [size, count] : by_size) clique_sizes[std::to_string(size)] = count;
  r["maximal_cliques"] = Json{{"count", cliques.size()},
                              {"largest", cliques.empty() ? 0 : cliques.front().size()},
                              {"by_size", clique_sizes}};
  write_csv(cfg, "cliques.csv", clique_csv);

  Json mix = Json::object();
  for (auto c : selected_covariates(cfg, g)) {
    const std::string name(mixing::to_string(c));
    try {
      const auto part = mixing::partition_by(g, c);
      const auto mm = mixing::mixing_matrix(g, part);
      Json j{{"groups", part.labels}, {"modularity", mixing::modularity(mm)}};
      try {
        j["assortativity"] = mixing::assortativity(mm);
      } catch (const Error& e) {
        j["assortativity"] = error_json(e);
      }
      mix[name] = j;
      write_csv(cfg, "mixing_" + slug(name) + ".csv", mixing::mixing_csv(mm, part.labels));
    } catch (const Error& e) {
      mix[name] = error_json(e);
    }
  }
  r["mixing"] = mix;

  if (g.columns().detection_date) {
    const auto lag = mixing::detection_lag(g);
    Json strata = Json::array();
    for (const auto& s : lag.strata) {
      strata.push_back(Json{{"ego_mode", s.ego_mode},
                            {"edges", s.edges},
                            {"mean_days", s.mean_days},
                            {"median_days", s.median_days}});
    }
    r["detection_lag"] = Json{{"strata", strata}, {"excluded_edges", lag.excluded_edges}};
  }
  finish(cfg, "structure", r);
  return r;
}

Json run_communities(const PipelineConfig& cfg, const Dataset& data) {
  const auto& g = data.graph;
  Json r = base_report(cfg, data, "communities");
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "no edges to cluster");
  const auto giant = giant_component(g);
  r["giant_vertices"] = giant.vertex_count();
  r["giant_edges"] = giant.edge_count();
  r["resolution_limit"] = community::resolution_limit(giant.edge_count());

  const auto part =
      community::best_of_restarts(giant, derive_seed(cfg.seed, 0, kClusterTag), cfg.restarts);
  const auto cg = community::cluster_graph(giant, part);
  Json sizes = Json::array();
  for (const auto& node : cg.nodes) sizes.push_back(node.size);
  r["partition"] = Json{{"modularity", part.modularity},
                        {"clusters", part.clusters},
                        {"cluster_sizes", sizes},
                        {"inter_cluster_edges", cg.inter_cluster_edges()},
                        {"intra_cluster_edges", cg.intra_cluster_edges()}};
  write_csv(cfg, "partition.csv", community::partition_csv(giant, part));
  write_csv(cfg, "cluster_nodes.csv", community::cluster_nodes_csv(cg));
  write_csv(cfg, "cluster_links.csv", community::cluster_links_csv(cg));

  if (giant.edge_count() >= 2) {
    const auto sc = nullmodel::SwapChainConfig::defaults_for(giant, cfg.replicates,
                                                             derive_seed(cfg.seed, 0, kNullTag));
    const auto nd = nullmodel::null_modularity(giant, sc, cfg.restarts);
    const auto verdict = nullmodel::significance(part.modularity, nd);
    r["null_model"] = Json{{"replicates", cfg.replicates},
                           {"burn_in_swaps", sc.burn_in_swaps},
                           {"thinning_swaps", sc.thinning_swaps},
                           {"mean", nd.mean},
                           {"max", nd.max},
                           {"mean_acceptance", stats::mean(nd.acceptance_rates)},
                           {"significant", verdict.significant},
                           {"exceedance", verdict.exceedance}};
    write_csv(cfg, "null_modularity.csv", nullmodel::null_samples_csv(nd));
  } else {
    r["null_model"] = error_json(Error(ErrorCode::TooFewEdges, "null model needs two edges"));
  }

  community::SubclusteringOptions so;
  so.null_replicates = cfg.replicates;
  so.restarts = cfg.restarts;
  so.seed = derive_seed(cfg.seed, 0, kSubclusterTag);
  Json sub = Json::array();
  for (const auto& s : community::recursive_subclustering(giant, part, so)) {
    Json j{{"cluster", s.parent_cluster},
           {"size", s.size},
           {"edges", s.edges},
           {"significant", s.significant},
           {"below_resolution", s.below_resolution}};
    if (s.subpartition) {
      j["modularity"] = s.subpartition->modularity;
      j["subclusters"] = s.subpartition->clusters;
      j["null_mean"] = s.null_mean;
      j["null_max"] = s.null_max;
    }
    if (!s.note.empty()) j["note"] = s.note;
    sub.push_back(j);
  }
  r["subclustering"] = sub;

  Json layout_info;
  const auto pos = cluster_positions(cg, cfg, layout_info);
  r["layout"] = layout_info;
  layout::ClusterFigureOptions fig;
  fig.title = "clusters";
  io::write_text(cfg.out / "clusters.svg", layout::render_cluster_svg(cg, pos, fig));
  Json figures = Json::array({"clusters.svg"});

  std::optional<mixing::Covariate> atyp_cov;
  if (giant.columns().orientation) {
    atyp_cov = mixing::Covariate::Orientation;
  } else {
    for (auto c : selected_covariates(cfg, giant)) {
      if (column_present(giant, c)) {
        atyp_cov = c;
        break;
      }
    }
  }
  if (atyp_cov) {
    const auto ar =
        community::atypicality_report(giant, part, *atyp_cov, derive_seed(cfg.seed, 0, kAtypicalTag));
    Json clusters = Json::array();
    for (const auto& c : ar.clusters) {
      Json j{{"cluster", c.cluster},
             {"size", c.size},
             {"statistic", c.test.statistic},
             {"dof", c.test.dof},
             {"pvalue", c.test.pvalue},
             {"small_expected", c.test.small_expected},
             {"atypical", c.atypical},
             {"group", c.group},
             {"msm_share", c.msm_share}};
      if (c.test.monte_carlo_pvalue) j["monte_carlo_pvalue"] = *c.test.monte_carlo_pvalue;
      clusters.push_back(j);
      fig.pvalues.push_back(c.test.pvalue);
      fig.groups.push_back(c.group);
    }
    r["atypicality"] = Json{{"covariate", std::string(mixing::to_string(ar.covariate))},
                            {"categories", ar.categories},
                            {"reference", ar.reference},
                            {"atypical_clusters", ar.atypical_clusters},
                            {"msm_group_clusters", ar.msm_group_clusters},
                            {"msm_group_persons", ar.msm_group_persons},
                            {"mixed_group_clusters", ar.mixed_group_clusters},
                            {"mixed_group_persons", ar.mixed_group_persons},
                            {"inter_group_edges", ar.inter_group_edges},
                            {"clusters", clusters}};
    fig.fill = layout::ClusterFill::PValue;
    fig.title = "cluster p-values";
    io::write_text(cfg.out / "clusters_pvalue.svg", layout::render_cluster_svg(cg, pos, fig));
    fig.fill = layout::ClusterFill::Group;
    fig.title = "cluster groups";
    io::write_text(cfg.out / "clusters_groups.svg", layout::render_cluster_svg(cg, pos, fig));
    figures.push_back("clusters_pvalue.svg");
    figures.push_back("clusters_groups.svg");
  } else {
    r["atypicality"] = error_json(Error(ErrorCode::MissingCovariate, "no covariate available"));
  }
  r["figures"] = figures;
  finish(cfg, "communities", r);
  return r;
}

Json run_render(const PipelineConfig& cfg, const Dataset& data) {
  const auto& g = data.graph;
  Json r = base_report(cfg, data, "render");
  if (g.vertex_count() == 0) throw Error(ErrorCode::EmptyGraph, "no vertices");
  const auto giant = giant_component(g);
  r["vertices"] = giant.vertex_count();
  r["edges"] = giant.edge_count();
  std::vector<layout::Point> coords(giant.vertex_count());
  if (giant.vertex_count() >= 2) {
    layout::LayoutConfig lc;
    lc.delta = cfg.layout_delta;
    lc.max_iterations = cfg.layout_iterations;
    lc.seed = derive_seed(cfg.seed, 0, kLayoutTag);
    auto pos = layout::minimize_layout(giant, lc);
    r["layout"] = Json{{"converged", pos.converged},
                       {"final_energy", pos.final_energy},
                       {"initial_energy", pos.energy_trace.front()},
                       {"iterations", pos.iterations}};
    coords = std::move(pos.coordinates);
  }
  std::optional<mixing::Covariate> color_by;
  const auto covs = selected_covariates(cfg, giant);
  if (!covs.empty() && column_present(giant, covs.front())) color_by = covs.front();
  r["color_by"] = color_by ? Json(std::string(mixing::to_string(*color_by))) : Json(nullptr);
  io::write_text(cfg.out / "layout.svg", layout::render_vertex_svg(giant, coords, color_by));

  io::CsvTable positions{{"vertex_id", "x", "y"}, {}};
  for (VertexIndex v = 0; v < giant.vertex_count(); ++v) {
    char x[32], y[32];
    std::snprintf(x, sizeof x, "%.6f", coords[v].x);
    std::snprintf(y, sizeof y, "%.6f", coords[v].y);
    positions.rows.push_back({giant.vertex(v).id, x, y});
  }
  write_csv(cfg, "positions.csv", positions);
  r["figures"] = {"layout.svg"};
  finish(cfg, "render", r);
  return r;
}

std::vector<std::filesystem::path> run_command(std::string_view command,
                                               const PipelineConfig& cfg) {
  cfg.validate();
  const bool known = std::find(std::begin(kCommands), std::end(kCommands), command) !=
                     std::end(kCommands);
  if (!known) throw config_error("unknown command: " + std::string(command));
  const auto data = load(cfg);
  std::filesystem::create_directories(cfg.out);

  using Runner = Json (*)(const PipelineConfig&, const Dataset&);
  const std::pair<std::string_view, Runner> steps[] = {{"summary", run_summary},
                                                       {"degrees", run_degrees},
                                                       {"structure", run_structure},
                                                       {"communities", run_communities},
                                                       {"render", run_render}};
  std::vector<std::filesystem::path> written;
  for (const auto& [name, run] : steps) {
    if (command == "all" || command == name) {
      run(cfg, data);
      written.push_back(cfg.out / (std::string(name) + ".json"));
    }
  }
  return written;
}

}  // namespace contactnet::pipeline
