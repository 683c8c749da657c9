#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "textshape/geom.hpp"

namespace textshape {

struct Triangle {
  Point2 a;
  Point2 b;
  Point2 c;
  double circumradius = 0.0;
};

/// Circumscribed-circle radius; +infinity for collinear input.
double circumradius(Point2 a, Point2 b, Point2 c);
Triangle make_triangle(Point2 a, Point2 b, Point2 c);

/// Indexed Delaunay triangulation.
///
/// `points` holds the deduplicated input in order of first occurrence.
/// Triangles are CCW; `neighbors[t][k]` is the triangle across the edge
/// opposite vertex k, or -1 on the convex hull.
struct DelaunayMesh {
  std::vector<Point2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 3>> neighbors;

  /// Snapped integer coordinates used by the exact predicates.
  std::vector<std::array<std::int64_t, 2>> lattice;

  std::size_t size() const noexcept { return triangles.size(); }
  Triangle triangle(std::size_t t) const;
  double circumradius(std::size_t t) const;
  /// Exact orientation sign of three mesh vertices (-1, 0, 1).
  int orientation(int a, int b, int c) const;
};

/// Delaunay triangulation with exact predicates.
///
/// Coordinates are snapped onto a 2^30 lattice over the bounding box before any
/// predicate is evaluated, so orientation and in-circle tests are exact integer
/// arithmetic. Points that snap to the same lattice node count as duplicates.
/// Throws DegenerateInputError for fewer than three distinct or all-collinear points.
DelaunayMesh delaunay_mesh(std::span<const Point2> points);

std::vector<Triangle> delaunay(std::span<const Point2> points);

}  // namespace textshape
