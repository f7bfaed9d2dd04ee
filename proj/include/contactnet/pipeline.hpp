#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "contactnet/degree_tail.hpp"
#include "contactnet/graph.hpp"
#include "contactnet/io.hpp"
#include "contactnet/mixing.hpp"

namespace contactnet::pipeline {

struct PipelineConfig {
  std::filesystem::path vertices;
  std::filesystem::path edges;
  std::filesystem::path out{"out"};
  std::uint64_t seed{1};
  int replicates{100};
  int restarts{8};
  /// Empty selects every covariate present in the data.
  std::vector<mixing::Covariate> covariates;
  bool oriented{false};
  degree::DegreeSource degree_source{degree::DegreeSource::Declared};
  int permutations{degree::kDefaultPermutations};
  double layout_delta{1.0};
  int layout_iterations{500};

  /// Throws Error(InvalidArgument) on non-positive counts or empty paths.
  void validate() const;
  io::Json to_json() const;
};

/// Applies `key = value` lines (TOML subset: '#' comments, quoted strings,
/// integers, booleans, arrays of strings for `covariate`) on top of `cfg`.
/// Unknown keys and malformed values throw Error(InvalidArgument).
void apply_config_text(PipelineConfig& cfg, std::string_view text);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// A loaded dataset plus the loader's warnings.
struct Dataset {
  ContactGraph graph;
  std::vector<std::string> warnings;
};

Dataset load(const PipelineConfig& cfg);

// Each run_* writes `<out>/<name>.json` plus sidecars and returns the report.
io::Json run_summary(const PipelineConfig& cfg, const Dataset& data);
io::Json run_degrees(const PipelineConfig& cfg, const Dataset& data);
io::Json run_structure(const PipelineConfig& cfg, const Dataset& data);
io::Json run_communities(const PipelineConfig& cfg, const Dataset& data);
io::Json run_render(const PipelineConfig& cfg, const Dataset& data);

inline constexpr std::string_view kCommands[] = {"summary", "degrees", "structure",
                                                 "communities", "render", "all"};

/// Runs one subcommand (or all of them) and returns the written report paths.
std::vector<std::filesystem::path> run_command(std::string_view command,
                                               const PipelineConfig& cfg);

}  // namespace contactnet::pipeline
