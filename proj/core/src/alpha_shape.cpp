#include "textshape/alpha_shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace textshape {

AlphaParam::AlphaParam(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0)) throw DegenerateInputError("alpha must be > 0");
}

std::vector<int> alpha_filter(const DelaunayMesh& mesh, AlphaParam alpha) {
  std::vector<int> kept;
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    if (mesh.circumradius(t) <= alpha.value()) kept.push_back(static_cast<int>(t));
  }
  return kept;
}

namespace {

struct DirectedEdge {
  int from;
  int to;
};

double triangle_area(const DelaunayMesh& mesh, std::size_t t) {
  const auto& v = mesh.triangles[t];
  return 0.5 * std::abs(orient2d(mesh.points[v[0]], mesh.points[v[1]], mesh.points[v[2]]));
}

/// Largest-area edge-connected component among the flagged triangles.
std::vector<char> largest_component(const DelaunayMesh& mesh, const std::vector<char>& keep) {
  std::vector<int> label(mesh.size(), -1);
  std::vector<double> area;
  std::vector<int> stack;
  for (std::size_t seed = 0; seed < mesh.size(); ++seed) {
    if (!keep[seed] || label[seed] >= 0) continue;
    const int id = static_cast<int>(area.size());
    area.push_back(0.0);
    label[seed] = id;
    stack.push_back(static_cast<int>(seed));
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      area[id] += triangle_area(mesh, static_cast<std::size_t>(t));
      for (const int nb : mesh.neighbors[t]) {
        if (nb >= 0 && keep[nb] && label[nb] < 0) {
          label[nb] = id;
          stack.push_back(nb);
        }
      }
    }
  }
  const int best = static_cast<int>(std::max_element(area.begin(), area.end()) - area.begin());
  std::vector<char> comp(mesh.size(), 0);
  for (std::size_t t = 0; t < mesh.size(); ++t) comp[t] = label[t] == best;
  return comp;
}

double direction_angle(const DelaunayMesh& mesh, int from, int to) {
  const auto& a = mesh.lattice[from];
  const auto& b = mesh.lattice[to];
  return std::atan2(static_cast<double>(b[1] - a[1]), static_cast<double>(b[0] - a[0]));
}

/// Boundary loops of a triangle set; each loop keeps the set on its left.
std::vector<std::vector<int>> boundary_loops(const DelaunayMesh& mesh, const std::vector<char>& comp) {
  std::vector<DirectedEdge> edges;
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    if (!comp[t]) continue;
    const auto& v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int nb = mesh.neighbors[t][i];
      if (nb < 0 || !comp[nb]) edges.push_back({v[(i + 1) % 3], v[(i + 2) % 3]});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
    return a.from < b.from || (a.from == b.from && a.to < b.to);
  });

  auto outgoing = [&](int vertex) {
    const auto lo = std::lower_bound(edges.begin(), edges.end(), vertex,
                                     [](const DirectedEdge& e, int v) { return e.from < v; });
    auto hi = lo;
    while (hi != edges.end() && hi->from == vertex) ++hi;
    return std::pair{lo - edges.begin(), hi - edges.begin()};
  };

  // Successor of edge e: the first boundary edge leaving e.to when sweeping
  // clockwise from the reversed incoming direction. This stays inside one
  // wedge of the triangle set, so pinch vertices split into separate loops.
  auto successor = [&](std::size_t e) -> std::size_t {
    const int v = edges[e].to;
    const auto [lo, hi] = outgoing(v);
    if (hi - lo == 1) return static_cast<std::size_t>(lo);
    const double back = direction_angle(mesh, v, edges[e].from);
    std::size_t best = static_cast<std::size_t>(lo);
    double best_sweep = 10.0;
    for (auto k = lo; k < hi; ++k) {
      double sweep = back - direction_angle(mesh, v, edges[k].to);
      while (sweep <= 0.0) sweep += 2.0 * std::numbers::pi;
      while (sweep > 2.0 * std::numbers::pi) sweep -= 2.0 * std::numbers::pi;
      if (sweep < best_sweep) {
        best_sweep = sweep;
        best = static_cast<std::size_t>(k);
      }
    }
    return best;
  };

  std::vector<std::vector<int>> loops;
  std::vector<char> used(edges.size(), 0);
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> loop;
    std::size_t e = start;
    while (!used[e]) {
      used[e] = 1;
      loop.push_back(edges[e].from);
      e = successor(e);
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<int> drop_collinear(const DelaunayMesh& mesh, std::vector<int> loop) {
  bool changed = true;
  while (changed && loop.size() > 3) {
    changed = false;
    std::vector<int> next;
    next.reserve(loop.size());
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int prev = next.empty() ? loop[(i + n - 1) % n] : next.back();
      if (mesh.orientation(prev, loop[i], loop[(i + 1) % n]) == 0) {
        changed = true;
        continue;
      }
      next.push_back(loop[i]);
    }
    if (next.size() < 3) break;
    loop = std::move(next);
  }
  return loop;
}

std::optional<Polygon> shape_from(const DelaunayMesh& mesh, const std::vector<char>& keep) {
  if (std::none_of(keep.begin(), keep.end(), [](char k) { return k != 0; })) return std::nullopt;
  const std::vector<char> comp = largest_component(mesh, keep);

  std::vector<Point2> best;
  double best_area = 0.0;
  for (auto& loop : boundary_loops(mesh, comp)) {
    const std::vector<int> clean = drop_collinear(mesh, std::move(loop));
    std::vector<Point2> ring;
    ring.reserve(clean.size());
    for (const int v : clean) ring.push_back(mesh.points[v]);
    const double a = signed_area(ring);
    if (a > best_area) {
      best_area = a;
      best = std::move(ring);
    }
  }
  if (best.size() < 3) return std::nullopt;
  return Polygon(std::move(best));
}

std::vector<char> flags_for(const std::vector<double>& radii, double alpha) {
  std::vector<char> keep(radii.size());
  for (std::size_t t = 0; t < radii.size(); ++t) keep[t] = radii[t] <= alpha;
  return keep;
}

std::vector<double> radii_of(const DelaunayMesh& mesh) {
  std::vector<double> radii(mesh.size());
  for (std::size_t t = 0; t < mesh.size(); ++t) radii[t] = mesh.circumradius(t);
  return radii;
}

}  // namespace

Polygon alpha_shape(const DelaunayMesh& mesh, AlphaParam alpha) {
  auto poly = shape_from(mesh, flags_for(radii_of(mesh), alpha.value()));
  if (!poly) throw EmptyShapeError("alpha_shape: every triangle exceeds alpha");
  return *std::move(poly);
}

Polygon alpha_shape(std::span<const Point2> points, AlphaParam alpha) {
  return alpha_shape(delaunay_mesh(points), alpha);
}

double enclosed_fraction(std::span<const Point2> points, const Polygon& poly, double tol) {
  if (points.empty()) return 1.0;
  std::size_t inside = 0;
  for (const auto& p : points) {
    if (poly.contains(p) || distance_to_ring(p, poly.vertices()) <= tol) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(points.size());
}

AlphaShapeResult alpha_shape_with_fallback(std::span<const Point2> points, AlphaParam alpha,
                                           const AlphaFallback& policy, std::span<const Point2> anchors) {
  const DelaunayMesh mesh = delaunay_mesh(points);
  if (anchors.empty()) anchors = mesh.points;
  const std::vector<double> radii = radii_of(mesh);

  double current = alpha.value();
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    auto poly = shape_from(mesh, flags_for(radii, current));
    if (poly && (policy.min_enclosed_fraction <= 0.0 ||
                 enclosed_fraction(anchors, *poly) >= policy.min_enclosed_fraction)) {
      return {*std::move(poly), current, attempt, false};
    }
    current *= policy.growth;
  }

  std::vector<Point2> hull = convex_hull(mesh.points);
  return {Polygon(std::move(hull)), std::numeric_limits<double>::infinity(), policy.max_retries, true};
}

}  // namespace textshape
