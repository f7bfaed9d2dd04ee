// Command-line front end: contactnet <summary|degrees|structure|communities|render|all> [flags]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contactnet/error.hpp"
#include "contactnet/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct Flags {
  std::string config;
  std::optional<std::string> vertices, edges, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates, restarts, permutations, layout_iterations;
  std::optional<double> layout_delta;
  std::vector<std::string> covariates;
  bool oriented{false};
  std::optional<std::string> degree_source;
};

void add_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "TOML-style key = value file; flags override it");
  cmd.add_option("--vertices", f.vertices, "vertex table (CSV)");
  cmd.add_option("--edges", f.edges, "edge table (CSV)");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_option("--seed", f.seed, "master seed (positive)");
  cmd.add_option("--replicates", f.replicates, "null-model replicates");
  cmd.add_option("--restarts", f.restarts, "clustering restarts");
  cmd.add_option("--permutations", f.permutations, "joint-degree permutation count");
  cmd.add_option("--covariate", f.covariates,
                 "orientation, detection_mode, region or age_group (repeatable)");
  cmd.add_flag("--oriented", f.oriented, "also compute oriented geodesics");
  cmd.add_option("--degree-source", f.degree_source, "declared or observed")
      ->check(CLI::IsMember({"declared", "observed"}));
  cmd.add_option("--layout-delta", f.layout_delta, "layout spacing");
  cmd.add_option("--layout-iterations", f.layout_iterations, "layout descent iterations");
}

contactnet::pipeline::PipelineConfig build_config(const Flags& f) {
  contactnet::pipeline::PipelineConfig cfg;
  if (!f.config.empty()) contactnet::pipeline::apply_config_file(cfg, f.config);
  // Flags go through the same parser so both sources validate identically.
  std::string overrides;
  auto set = [&](const std::string& key, const std::string& value) {
    overrides += key + " = \"" + value + "\"\n";
  };
  if (f.vertices) set("vertices", *f.vertices);
  if (f.edges) set("edges", *f.edges);
  if (f.out) set("out", *f.out);
  if (f.seed) set("seed", std::to_string(*f.seed));
  if (f.replicates) set("replicates", std::to_string(*f.replicates));
  if (f.restarts) set("restarts", std::to_string(*f.restarts));
  if (f.permutations) set("permutations", std::to_string(*f.permutations));
  if (f.layout_iterations) set("layout_iterations", std::to_string(*f.layout_iterations));
  if (f.layout_delta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *f.layout_delta);
    set("layout_delta", buf);
  }
  if (f.degree_source) set("degree_source", *f.degree_source);
  if (f.oriented) set("oriented", "true");
  if (!f.covariates.empty()) {
    std::string list;
    for (const auto& c : f.covariates) list += (list.empty() ? "" : ",") + c;
    overrides += "covariate = [" + list + "]\n";
  }
  contactnet::pipeline::apply_config_text(cfg, overrides);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-network analysis pipeline"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"summary", "Counts by covariate and connected components"},
      {"degrees", "Power-law tail fits and joint-degree correlation"},
      {"structure", "Geodesics, articulation points, clustering, cliques and mixing"},
      {"communities", "Modularity clustering, null model and cluster figures"},
      {"render", "Vertex layout of the giant component"},
      {"all", "Every analysis above"},
  };
  for (auto [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  contactnet::pipeline::PipelineConfig cfg;
  try {
    cfg = build_config(flags);
  } catch (const contactnet::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    for (const auto& path : contactnet::pipeline::run_command(command, cfg)) {
      std::cout << path.generic_string() << '\n';
    }
  } catch (const contactnet::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
