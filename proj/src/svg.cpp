#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "contactnet/error.hpp"
#include "contactnet/layout.hpp"

namespace contactnet::layout {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 60.0;
constexpr double kMaxDiskRadius = 40.0;
constexpr double kVertexRadius = 5.0;

// Indexed by Orientation; unknown is gray.
constexpr std::array<const char*, 4> kOrientationColors{"#d62728", "#1f77b4", "#2ca02c",
                                                        "#999999"};
constexpr std::array<const char*, 10> kCategoryColors{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kDefaultVertexColor = "#4477aa";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps layout coordinates into the canvas, preserving aspect ratio.
class Viewport {
 public:
  explicit Viewport(std::span<const Point> pos) {
    if (pos.empty()) return;
    min_x_ = max_x_ = pos[0].x;
    min_y_ = max_y_ = pos[0].y;
    for (const auto& p : pos) {
      min_x_ = std::min(min_x_, p.x);
      max_x_ = std::max(max_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_y_ = std::max(max_y_, p.y);
    }
    const double span = std::max(max_x_ - min_x_, max_y_ - min_y_);
    scale_ = span > 0.0 ? (kCanvas - 2.0 * kMargin) / span : 1.0;
  }

  Point map(const Point& p) const {
    return {kMargin + (p.x - min_x_) * scale_, kMargin + (p.y - min_y_) * scale_};
  }

 private:
  double min_x_{0.0}, max_x_{0.0}, min_y_{0.0}, max_y_{0.0};
  double scale_{1.0};
};

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kCanvas) << "\" height=\""
      << fmt(kCanvas) << "\" viewBox=\"0 0 " << fmt(kCanvas) << ' ' << fmt(kCanvas) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << fmt(kCanvas / 2) << "\" y=\"24.000\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title) << "</text>\n";
  }
}

void legend(std::ostringstream& out, const std::vector<std::pair<std::string, std::string>>& items) {
  double y = kCanvas - 12.0 - 18.0 * static_cast<double>(items.size());
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& [label, color] : items) {
    out << "<rect x=\"10.000\" y=\"" << fmt(y) << "\" width=\"12.000\" height=\"12.000\" fill=\""
        << color << "\" stroke=\"black\" stroke-width=\"0.5\"/>";
    out << "<text x=\"28.000\" y=\"" << fmt(y + 10.0) << "\">" << escape(label) << "</text>\n";
    y += 18.0;
  }
  out << "</g>\n";
}

std::string gray_hex(int level) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
  return buf;
}

const char* group_color(const std::string& group) {
  if (group == "msm_group") return "#2ca02c";
  if (group == "mixed_group") return "#d62728";
  if (group == "atypical") return "#ff7f0e";
  return "#ffffff";
}

void pie(std::ostringstream& out, const Point& c, double r,
         const std::array<std::size_t, kOrientationCount>& counts) {
  std::size_t total = 0;
  for (auto k : counts) total += k;
  const auto whole = std::find_if(counts.begin(), counts.end(),
                                  [&](std::size_t k) { return k == total; });
  if (total == 0 || whole != counts.end()) {
    const char* color = total == 0 ? kOrientationColors[3]
                                   : kOrientationColors[static_cast<std::size_t>(whole - counts.begin())];
    out << "<circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" r=\"" << fmt(r)
        << "\" fill=\"" << color << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    return;
  }
  double angle = -std::numbers::pi / 2.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    const double sweep = 2.0 * std::numbers::pi * static_cast<double>(counts[k]) /
                         static_cast<double>(total);
    const double x0 = c.x + r * std::cos(angle);
    const double y0 = c.y + r * std::sin(angle);
    const double x1 = c.x + r * std::cos(angle + sweep);
    const double y1 = c.y + r * std::sin(angle + sweep);
    out << "<path d=\"M " << fmt(c.x) << ' ' << fmt(c.y) << " L " << fmt(x0) << ' ' << fmt(y0)
        << " A " << fmt(r) << ' ' << fmt(r) << " 0 " << (sweep > std::numbers::pi ? 1 : 0)
        << " 1 " << fmt(x1) << ' ' << fmt(y1) << " Z\" fill=\"" << kOrientationColors[k]
        << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    angle += sweep;
  }
}

}  // namespace

int pvalue_gray(double p) {
  if (std::isnan(p)) throw Error(ErrorCode::InvalidArgument, "p-value is NaN");
  const double darkness = p <= 0.0 ? 4.0 : std::clamp(-std::log10(p), 0.0, 4.0);
  return static_cast<int>(std::lround(255.0 * (1.0 - darkness / 4.0)));
}

std::string render_vertex_svg(const ContactGraph& g, std::span<const Point> pos,
                              std::optional<mixing::Covariate> color_by) {
  if (pos.size() != g.vertex_count()) {
    throw Error(ErrorCode::MissingPositions, "one position per vertex required");
  }
  std::optional<mixing::CovariatePartition> groups;
  if (color_by) groups = mixing::partition_by(g, *color_by);
  const Viewport view(pos);

  std::ostringstream out;
  open_svg(out, "");
  out << "<g class=\"edges\" stroke=\"#888888\" stroke-width=\"1\">\n";
  for (const auto& e : g.edges()) {
    const auto a = view.map(pos[e.src]);
    const auto b = view.map(pos[e.dst]);
    out << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
        << "\" y2=\"" << fmt(b.y) << "\"/>\n";
  }
  out << "</g>\n<g class=\"vertices\" stroke=\"black\" stroke-width=\"0.5\">\n";
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    const auto c = view.map(pos[v]);
    const char* color = kDefaultVertexColor;
    if (groups) {
      const auto k = static_cast<std::size_t>(groups->assignment[v]);
      color = *color_by == mixing::Covariate::Orientation
                  ? kOrientationColors[static_cast<std::size_t>(g.vertex(v).orientation)]
                  : kCategoryColors[k % kCategoryColors.size()];
    }
    out << "<circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" r=\"" << fmt(kVertexRadius)
        << "\" fill=\"" << color << "\"><title>" << escape(g.vertex(v).id) << "</title></circle>\n";
  }
  out << "</g>\n";
  if (groups) {
    std::vector<std::pair<std::string, std::string>> items;
    for (std::size_t k = 0; k < groups->labels.size(); ++k) {
      const char* color = kCategoryColors[k % kCategoryColors.size()];
      if (*color_by == mixing::Covariate::Orientation) {
        for (std::size_t o = 0; o < kOrientationColors.size(); ++o) {
          if (groups->labels[k] == display_name(static_cast<Orientation>(o))) {
            color = kOrientationColors[o];
          }
        }
      }
      items.emplace_back(groups->labels[k], color);
    }
    legend(out, items);
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_cluster_svg(const community::ClusterGraph& cg, std::span<const Point> pos,
                               const ClusterFigureOptions& options) {
  const std::size_t n = cg.nodes.size();
  if (pos.size() != n) throw Error(ErrorCode::MissingPositions, "one position per cluster required");
  if (options.fill == ClusterFill::PValue && options.pvalues.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "one p-value per cluster required");
  }
  if (options.fill == ClusterFill::Group && options.groups.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "one group per cluster required");
  }
  std::size_t max_size = 1;
  for (const auto& node : cg.nodes) max_size = std::max(max_size, node.size);
  const Viewport view(pos);

  std::ostringstream out;
  open_svg(out, options.title);
  out << "<g class=\"links\" stroke=\"#555555\">\n";
  for (const auto& link : cg.links) {
    const auto a = view.map(pos[static_cast<std::size_t>(link.a)]);
    const auto b = view.map(pos[static_cast<std::size_t>(link.b)]);
    out << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
        << "\" y2=\"" << fmt(b.y) << "\" stroke-width=\""
        << fmt(static_cast<double>(link.multiplicity)) << '"';
    if (link.multiplicity == 1) out << " stroke-dasharray=\"4,3\"";
    out << "/>\n";
  }
  out << "</g>\n<g class=\"clusters\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = cg.nodes[i];
    const auto c = view.map(pos[i]);
    const double r = kMaxDiskRadius * std::sqrt(static_cast<double>(node.size) /
                                                static_cast<double>(max_size));
    switch (options.fill) {
      case ClusterFill::Pie:
        pie(out, c, r, node.orientation);
        break;
      case ClusterFill::PValue:
      case ClusterFill::Group: {
        const std::string color = options.fill == ClusterFill::PValue
                                      ? gray_hex(pvalue_gray(options.pvalues[i]))
                                      : group_color(options.groups[i]);
        out << "<circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" r=\"" << fmt(r)
            << "\" fill=\"" << color << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        break;
      }
    }
    out << "<text x=\"" << fmt(c.x) << "\" y=\"" << fmt(c.y - r - 3.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << node.cluster
        << "</text>\n";
  }
  out << "</g>\n";
  switch (options.fill) {
    case ClusterFill::Pie:
      legend(out, {{"woman", kOrientationColors[0]},
                   {"heterosexual_man", kOrientationColors[1]},
                   {"msm", kOrientationColors[2]},
                   {"unknown", kOrientationColors[3]}});
      break;
    case ClusterFill::PValue:
      legend(out, {{"p = 1", gray_hex(pvalue_gray(1.0))},
                   {"p = 0.01", gray_hex(pvalue_gray(0.01))},
                   {"p <= 1e-4", gray_hex(pvalue_gray(0.0))}});
      break;
    case ClusterFill::Group:
      legend(out, {{"typical", group_color("typical")},
                   {"msm_group", group_color("msm_group")},
                   {"mixed_group", group_color("mixed_group")}});
      break;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace contactnet::layout
