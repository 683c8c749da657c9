#pragma once

#include <limits>
#include <span>
#include <vector>

#include "textshape/delaunay.hpp"
#include "textshape/geom.hpp"

namespace textshape {

/// Circumradius threshold for the alpha filter, in the units of the points
/// it is applied to (normalized units inside the decoder).
class AlphaParam {
 public:
  explicit AlphaParam(double alpha);

  static AlphaParam infinity() { return AlphaParam(std::numeric_limits<double>::infinity()); }

  double value() const noexcept { return alpha_; }
  bool is_infinite() const noexcept { return alpha_ == std::numeric_limits<double>::infinity(); }

 private:
  double alpha_;
};

inline constexpr double kDefaultAlpha = 0.06;

/// Indices of the triangles whose circumradius does not exceed alpha.
std::vector<int> alpha_filter(const DelaunayMesh& mesh, AlphaParam alpha);

/// Classical alpha shape of a point set.
///
/// Triangulates, keeps triangles with circumradius <= alpha, takes the
/// edge-connected component of largest area and returns its outer boundary
/// (collinear vertices removed, CCW). Pinch vertices split the boundary walk,
/// so the result is always a simple polygon.
/// Throws EmptyShapeError when no triangle survives the filter.
Polygon alpha_shape(std::span<const Point2> points, AlphaParam alpha);
Polygon alpha_shape(const DelaunayMesh& mesh, AlphaParam alpha);

/// Retry policy used when the requested alpha is too tight for the point set.
struct AlphaFallback {
  int max_retries = 4;
  double growth = 2.0;
  /// Minimum fraction of the anchor points that must lie inside or on the
  /// polygon for a shape to be accepted. 0 accepts any non-empty shape.
  double min_enclosed_fraction = 0.0;
};

struct AlphaShapeResult {
  Polygon polygon;
  double alpha_used = 0.0;  // +infinity when the convex hull was used
  int retries = 0;
  bool convex_hull_fallback = false;
};

/// alpha_shape with escalation: on an empty (or insufficiently enclosing)
/// result, alpha is multiplied by `growth` up to `max_retries` times, and
/// finally the convex hull is returned. `anchors` are the points the shape
/// must enclose; when empty, the input points themselves are used.
AlphaShapeResult alpha_shape_with_fallback(std::span<const Point2> points, AlphaParam alpha,
                                           const AlphaFallback& policy = {},
                                           std::span<const Point2> anchors = {});

/// Fraction of points inside the polygon or within `tol` of its boundary.
double enclosed_fraction(std::span<const Point2> points, const Polygon& poly, double tol = 1e-9);

}  // namespace textshape
