#include "textshape/encode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace textshape {

std::vector<Point2> AnnotationPolygon::ring() const {
  std::vector<Point2> out(upper.begin(), upper.end());
  out.insert(out.end(), lower.rbegin(), lower.rend());
  return out;
}

AnnotationPolygon split_sides(std::span<const Point2> vertices, bool ignore) {
  const std::size_t n = vertices.size();
  if (n < 4) throw MalformedAnnotationError("annotation needs at least 4 vertices, got " + std::to_string(n));
  if (n % 2 != 0) throw MalformedAnnotationError("annotation has an odd vertex count (" + std::to_string(n) + ")");
  for (const auto& p : vertices) {
    if (!is_finite(p)) throw MalformedAnnotationError("annotation vertex is not finite");
  }
  if (!is_simple(vertices)) throw MalformedAnnotationError("annotation polygon is not simple");

  AnnotationPolygon a;
  a.upper.assign(vertices.begin(), vertices.begin() + static_cast<std::ptrdiff_t>(n / 2));
  a.lower.assign(vertices.rbegin(), vertices.rbegin() + static_cast<std::ptrdiff_t>(n / 2));
  a.ignore = ignore;
  a.source_vertex_count = static_cast<int>(n);
  return a;
}

namespace {

/// Cumulative arc length of a chain normalized to [0, 1].
std::vector<double> arc_parameters(const std::vector<Point2>& chain) {
  std::vector<double> s(chain.size(), 0.0);
  for (std::size_t i = 1; i < chain.size(); ++i) s[i] = s[i - 1] + distance(chain[i - 1], chain[i]);
  const double total = s.back();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    s[i] = total > 0.0 ? s[i] / total : static_cast<double>(i) / static_cast<double>(chain.size() - 1);
  }
  return s;
}

void require_chains(const AnnotationPolygon& a) {
  if (a.upper.size() < 2 || a.lower.size() < 2) {
    throw MalformedAnnotationError("annotation chains need at least 2 vertices each");
  }
}

}  // namespace

std::vector<ChainLink> zip_chains(const AnnotationPolygon& a) {
  require_chains(a);
  const std::vector<double> su = arc_parameters(a.upper);
  const std::vector<double> sl = arc_parameters(a.lower);
  const std::size_t m = a.upper.size();
  const std::size_t n = a.lower.size();

  std::vector<ChainLink> links;
  links.reserve(m + n - 1);
  std::size_t i = 0, j = 0;
  links.push_back({0, 0});
  while (i + 1 < m || j + 1 < n) {
    const bool advance_upper = (j + 1 == n) || (i + 1 < m && su[i + 1] <= sl[j + 1]);
    if (advance_upper) {
      ++i;
    } else {
      ++j;
    }
    links.push_back({i, j});
  }
  return links;
}

std::vector<Triangle> triangulate_annotation(const AnnotationPolygon& a) {
  const std::vector<ChainLink> links = zip_chains(a);
  std::vector<Triangle> out;
  out.reserve(links.size());
  for (std::size_t k = 1; k < links.size(); ++k) {
    const ChainLink prev = links[k - 1];
    const ChainLink cur = links[k];
    const Point2 u = a.upper[prev.upper];
    const Point2 l = a.lower[prev.lower];
    const Point2 apex = cur.upper != prev.upper ? a.upper[cur.upper] : a.lower[cur.lower];
    if (orient2d(u, l, apex) == 0.0) continue;
    out.push_back(cur.upper != prev.upper ? make_triangle(u, apex, l) : make_triangle(u, l, apex));
  }
  return out;
}

Polygon central_region_polygon(const AnnotationPolygon& a) {
  std::vector<Point2> top;
  std::vector<Point2> bottom;
  for (const ChainLink& link : zip_chains(a)) {
    const Point2 u = a.upper[link.upper];
    const Point2 l = a.lower[link.lower];
    if (u == l) continue;
    const Point2 near_upper = lerp(u, l, kCentralInset);
    const Point2 near_lower = lerp(u, l, 1.0 - kCentralInset);
    if (top.empty() || top.back() != near_upper) top.push_back(near_upper);
    if (bottom.empty() || bottom.back() != near_lower) bottom.push_back(near_lower);
  }
  std::vector<Point2> ring = std::move(top);
  ring.insert(ring.end(), bottom.rbegin(), bottom.rend());
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw MalformedAnnotationError("central region has fewer than 3 vertices");
  try {
    return Polygon(std::move(ring));
  } catch (const DegenerateInputError& e) {
    throw MalformedAnnotationError(std::string("central region is degenerate: ") + e.what());
  }
}

LabelRaster encode(std::span<const AnnotationPolygon> annotations, const RasterGrid& grid,
                   EncodeDiagnostics* diagnostics) {
  grid.validate();
  LabelRaster out(grid);
  EncodeDiagnostics diag;

  std::vector<std::vector<Point2>> rings(annotations.size());
  for (std::size_t k = 0; k < annotations.size(); ++k) rings[k] = annotations[k].ring();

  // Owner annotation per cell, -1 when unclaimed.
  Grid2D<int> owner(grid.width, grid.height, -1);
  const ScanLattice lattice{{0.0, 0.0}, static_cast<double>(grid.stride), grid.width, grid.height};

  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const AnnotationPolygon& ann = annotations[k];
    if (ann.ignore) {
      ++diag.ignored;
      scan_convert(rings[k], lattice, [&](int row, int first, int last) {
        for (int i = first; i < last; ++i) out.ignore_mask(i, row) = 1;
      });
      continue;
    }
    ++diag.instances;
    const Polygon central = central_region_polygon(ann);
    bool covered = false;
    scan_convert(central.vertices(), lattice, [&](int row, int first, int last) {
      covered = true;
      for (int i = first; i < last; ++i) {
        int& cell = owner(i, row);
        if (cell < 0) {
          cell = static_cast<int>(k);
          continue;
        }
        ++diag.conflict_cells;
        const Point2 c = grid.cell_center(i, row);
        const double mine = distance_to_ring(c, rings[k]);
        const double theirs = distance_to_ring(c, rings[static_cast<std::size_t>(cell)]);
        if (mine < theirs) cell = static_cast<int>(k);
      }
    });
    if (!covered) ++diag.empty_regions;
  }

  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const int k = owner(i, j);
      if (k < 0) continue;
      const NearestPoint np = nearest_point_on_ring(grid.cell_center(i, j), rings[static_cast<std::size_t>(k)]);
      out.mask(i, j) = 1;
      out.dist_x(i, j) = np.dx;
      out.dist_y(i, j) = np.dy;
    }
  }

  if (diagnostics) *diagnostics = diag;
  return out;
}

}  // namespace textshape
