#include "contactnet/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contactnet/error.hpp"
#include "contactnet/numeric.hpp"

namespace contactnet::layout {

EdgeList edge_list(const ContactGraph& g) {
  EdgeList out;
  out.reserve(g.edge_count());
  for (const auto& e : g.edges()) out.emplace_back(e.src, e.dst);
  return out;
}

void LayoutConfig::validate() const {
  if (!(delta > 0.0) || !(gradient_tolerance > 0.0) || max_iterations < 0) {
    throw Error(ErrorCode::InvalidArgument, "layout needs delta > 0 and gradient_tolerance > 0");
  }
}

namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void check_sizes(std::size_t n, std::span<const Point> pos) {
  if (pos.size() != n) throw Error(ErrorCode::InvalidArgument, "one position per vertex required");
}

// Energy, or +inf when some pair is closer than `min_separation`.
double energy_or_inf(std::size_t n, const EdgeList& edges, std::span<const Point> pos,
                     double delta, double min_separation) {
  NeumaierSum repulsion;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = distance(pos[i], pos[j]);
      if (!(r > min_separation)) return std::numeric_limits<double>::infinity();
      repulsion.add(std::log(r));
    }
  }
  NeumaierSum attraction;
  for (const auto& [a, b] : edges) {
    const double r = distance(pos[a], pos[b]);
    attraction.add(r * r * r);
  }
  // Each unordered pair appears twice in the ordered-pair sum.
  return 2.0 * attraction.value() / (3.0 * delta) - 2.0 * delta * delta * repulsion.value();
}

}  // namespace

double layout_energy(std::size_t n, const EdgeList& edges, std::span<const Point> pos,
                     double delta) {
  check_sizes(n, pos);
  const double e = energy_or_inf(n, edges, pos, delta, 0.0);
  if (std::isinf(e)) throw Error(ErrorCode::CoincidentVertices, "two vertices share a position");
  return e;
}

double layout_energy(const ContactGraph& g, std::span<const Point> pos, double delta) {
  return layout_energy(g.vertex_count(), edge_list(g), pos, delta);
}

std::vector<Point> layout_gradient(std::size_t n, const EdgeList& edges,
                                   std::span<const Point> pos, double delta) {
  check_sizes(n, pos);
  std::vector<Point> grad(n);
  const double d2 = delta * delta;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pos[i].x - pos[j].x;
      const double dy = pos[i].y - pos[j].y;
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) throw Error(ErrorCode::CoincidentVertices, "two vertices share a position");
      const double f = -2.0 * d2 / r2;
      grad[i].x += f * dx;
      grad[i].y += f * dy;
      grad[j].x -= f * dx;
      grad[j].y -= f * dy;
    }
  }
  for (const auto& [a, b] : edges) {
    const double dx = pos[a].x - pos[b].x;
    const double dy = pos[a].y - pos[b].y;
    const double f = 2.0 * std::hypot(dx, dy) / delta;
    grad[a].x += f * dx;
    grad[a].y += f * dy;
    grad[b].x -= f * dx;
    grad[b].y -= f * dy;
  }
  return grad;
}

std::vector<Point> layout_gradient(const ContactGraph& g, std::span<const Point> pos,
                                   double delta) {
  return layout_gradient(g.vertex_count(), edge_list(g), pos, delta);
}

namespace {

bool edges_connect(std::size_t n, const EdgeList& edges) {
  std::vector<std::vector<VertexIndex>> adj(n);
  for (const auto& [a, b] : edges) {
    adj.at(a).push_back(b);
    adj.at(b).push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<VertexIndex> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (VertexIndex w : adj[queue[head]]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return queue.size() == n;
}

double max_norm(const std::vector<Point>& g) {
  double m = 0.0;
  for (const auto& p : g) m = std::max({m, std::abs(p.x), std::abs(p.y)});
  return m;
}

}  // namespace

VertexPositions minimize_layout(std::size_t n, const EdgeList& edges, const LayoutConfig& cfg) {
  cfg.validate();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "layout needs at least two vertices");
  if (!edges_connect(n, edges)) throw Error(ErrorCode::NotConnected, "lay out each component");

  const double delta = cfg.delta;
  const double min_sep = 1e-9 * delta;
  Rng rng(cfg.seed);
  const double side = delta * std::sqrt(static_cast<double>(n));
  std::vector<Point> pos(n);
  for (auto& p : pos) {
    p.x = side * uniform_unit(rng);
    p.y = side * uniform_unit(rng);
  }
  // Re-jitter coincident starting points.
  for (bool clash = true; clash;) {
    clash = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (distance(pos[i], pos[j]) <= min_sep) {
          pos[j].x += delta * 1e-6 * (2.0 * uniform_unit(rng) - 1.0);
          pos[j].y += delta * 1e-6 * (2.0 * uniform_unit(rng) - 1.0);
          clash = true;
        }
      }
    }
  }

  VertexPositions out;
  double energy = energy_or_inf(n, edges, pos, delta, min_sep);
  auto grad = layout_gradient(n, edges, pos, delta);
  out.energy_trace.push_back(energy);
  double step = 0.1 * delta / std::max(max_norm(grad), 1e-300);
  std::vector<Point> trial(n);

  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (max_norm(grad) < cfg.gradient_tolerance) {
      out.converged = true;
      break;
    }
    double grad_sq = 0.0;
    for (const auto& g : grad) grad_sq += g.x * g.x + g.y * g.y;

    // Backtrack until the Armijo condition holds; steps that bring two points
    // within the minimum separation evaluate to +inf and are rejected.
    double trial_energy = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i].x = pos[i].x - step * grad[i].x;
        trial[i].y = pos[i].y - step * grad[i].y;
      }
      trial_energy = energy_or_inf(n, edges, trial, delta, min_sep);
      if (trial_energy <= energy - 1e-4 * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no decrease representable at this precision

    auto next_grad = layout_gradient(n, edges, trial, delta);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sx = trial[i].x - pos[i].x;
      const double sy_ = trial[i].y - pos[i].y;
      ss += sx * sx + sy_ * sy_;
      sy += sx * (next_grad[i].x - grad[i].x) + sy_ * (next_grad[i].y - grad[i].y);
    }
    step = sy > 0.0 ? ss / sy : 2.0 * step;
    std::swap(pos, trial);
    grad = std::move(next_grad);
    energy = trial_energy;
    out.energy_trace.push_back(energy);
  }
  if (!out.converged && max_norm(grad) < cfg.gradient_tolerance) out.converged = true;

  out.coordinates = std::move(pos);
  out.final_energy = energy;
  out.iterations = it;
  return out;
}

VertexPositions minimize_layout(const ContactGraph& g, const LayoutConfig& cfg) {
  return minimize_layout(g.vertex_count(), edge_list(g), cfg);
}

}  // namespace contactnet::layout
