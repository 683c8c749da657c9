#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "textshape/error.hpp"

namespace textshape {

// Points are in image pixels unless a function says otherwise. The y axis
// points down, as in image coordinates; "CCW" below always refers to the sign
// of the shoelace area, not to how the polygon looks on screen.

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
/// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double orient2d(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

enum class Orientation { CCW, CW };

/// Signed shoelace area of a closed ring.
double signed_area(std::span<const Point2> ring);

/// Closed polygon with at least three vertices and non-zero area.
///
/// The constructor validates finiteness and area but not simplicity; use
/// `is_simple` where the caller cannot vouch for it.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  Orientation orientation() const noexcept { return orientation_; }
  double signed_area() const;
  double area() const;

  /// Copy with counter-clockwise vertex order.
  Polygon to_ccw() const;
  /// Even-odd point-in-polygon test. Boundary points may go either way.
  bool contains(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
  Orientation orientation_ = Orientation::CCW;
};

struct BoundingBox {
  Point2 min;
  Point2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

BoundingBox bounding_box(std::span<const Point2> points);

/// Even-odd containment against a raw ring.
bool point_in_ring(Point2 p, std::span<const Point2> ring);

/// True when no two non-adjacent edges of the ring touch and the area is non-zero.
bool is_simple(std::span<const Point2> ring);

/// Isotropic map into the unit square: normalized = (p - offset) * scale.
struct NormTransform {
  Point2 offset;
  double scale = 1.0;

  Point2 apply(Point2 p) const { return {(p.x - offset.x) * scale, (p.y - offset.y) * scale}; }
  Point2 invert(Point2 q) const { return {q.x / scale + offset.x, q.y / scale + offset.y}; }
};

struct NormalizedPoints {
  std::vector<Point2> points;
  NormTransform transform;
};

/// Maps the bounding box's min corner to the origin and its longer side to 1.
NormalizedPoints normalize_points(std::span<const Point2> points);
Polygon denormalize_polygon(const Polygon& poly, const NormTransform& t);

struct NearestPoint {
  Point2 point;
  double dx = 0.0;  // point.x - query.x
  double dy = 0.0;  // point.y - query.y

  double distance() const { return std::hypot(dx, dy); }
};

/// Closest point on the ring's boundary, treating edges as segments.
///
/// Ties within a relative 1e-12 on distance resolve to the smallest y, then
/// the smallest x, so the result does not depend on vertex order.
NearestPoint nearest_point_on_ring(Point2 p, std::span<const Point2> ring);
NearestPoint nearest_point_on_polygon(Point2 p, const Polygon& poly);

/// Shortest distance from p to any edge of the ring.
double distance_to_ring(Point2 p, std::span<const Point2> ring);

/// Convex hull (Andrew's monotone chain), CCW, collinear points dropped.
std::vector<Point2> convex_hull(std::span<const Point2> points);

/// Minimum-area enclosing rectangle by rotating calipers over hull edges.
Polygon min_area_rect(const Polygon& poly);
Polygon min_area_rect(std::span<const Point2> points);

/// Rasterized intersection-over-union.
///
/// Both polygons are scan-converted onto a square-cell grid spanning their
/// joint bounding box, with `resolution` cells along its longer side; a cell
/// belongs to a polygon when its center does (even-odd rule).
double polygon_iou(const Polygon& a, const Polygon& b, int resolution = 512);

/// Drops vertices whose neighbours are collinear with them (|orient| <= tol * scale^2).
std::vector<Point2> remove_collinear(std::span<const Point2> ring, double tol = 1e-12);

}  // namespace textshape
