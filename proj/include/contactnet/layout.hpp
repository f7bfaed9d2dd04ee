#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contactnet/community.hpp"
#include "contactnet/graph.hpp"
#include "contactnet/mixing.hpp"

namespace contactnet::layout {

struct Point {
  double x{0.0};
  double y{0.0};
};

using EdgeList = std::vector<std::pair<VertexIndex, VertexIndex>>;

EdgeList edge_list(const ContactGraph& g);

struct LayoutConfig {
  double delta{1.0};  // target spacing
  int max_iterations{2000};
  double gradient_tolerance{1e-6};  // on the max-norm of the gradient
  std::uint64_t seed{1};

  void validate() const;
};

struct VertexPositions {
  std::vector<Point> coordinates;
  double final_energy{0.0};
  bool converged{false};
  int iterations{0};
  std::vector<double> energy_trace;  // energy after each accepted step, starting at the initial one
};

/// E = Σ_{i≠j} [ a_ij ‖z_i − z_j‖³ / (3δ) − δ² ln ‖z_i − z_j‖ ] over ordered pairs.
/// Throws CoincidentVertices when two points coincide.
double layout_energy(std::size_t n, const EdgeList& edges, std::span<const Point> pos,
                     double delta);
double layout_energy(const ContactGraph& g, std::span<const Point> pos, double delta);

/// Analytic ∂E/∂z_i.
std::vector<Point> layout_gradient(std::size_t n, const EdgeList& edges,
                                   std::span<const Point> pos, double delta);
std::vector<Point> layout_gradient(const ContactGraph& g, std::span<const Point> pos,
                                   double delta);

/// Monotone gradient descent (Barzilai–Borwein trial step, Armijo backtracking)
/// from a seeded uniform start in a square of side δ√n. Throws NotConnected for
/// disconnected graphs and InvalidArgument below two vertices.
VertexPositions minimize_layout(std::size_t n, const EdgeList& edges, const LayoutConfig& cfg);
VertexPositions minimize_layout(const ContactGraph& g, const LayoutConfig& cfg);

/// One circle per vertex, one line per edge. Circles are colored by the
/// covariate's group when one is given, a default color otherwise.
std::string render_vertex_svg(const ContactGraph& g, std::span<const Point> pos,
                              std::optional<mixing::Covariate> color_by = std::nullopt);

enum class ClusterFill {
  Pie,     // orientation shares
  PValue,  // grayscale, white = 1, black = 0, linear in -log10 p clamped to [0, 4]
  Group,   // typical / msm_group / mixed_group
};

struct ClusterFigureOptions {
  ClusterFill fill{ClusterFill::Pie};
  std::vector<double> pvalues;      // per cluster, for PValue
  std::vector<std::string> groups;  // per cluster, for Group
  std::string title;
};

/// Disk area ∝ cluster size; link width ∝ multiplicity, dashed for single edges.
/// Throws MissingPositions when positions do not cover every cluster.
std::string render_cluster_svg(const community::ClusterGraph& cg, std::span<const Point> pos,
                               const ClusterFigureOptions& options = {});

/// Gray level (0 = black, 255 = white) for a p-value.
int pvalue_gray(double p);

}  // namespace contactnet::layout
