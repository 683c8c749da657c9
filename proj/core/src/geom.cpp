#include "textshape/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textshape/raster.hpp"

namespace textshape {

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += (ring[j].x - ring[i].x) * (ring[j].y + ring[i].y);
  }
  return 0.5 * twice;
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw DegenerateInputError("polygon needs at least 3 vertices");
  for (const auto& p : vertices_) {
    if (!is_finite(p)) throw DegenerateInputError("polygon vertex is not finite");
  }
  const double a = textshape::signed_area(vertices_);
  if (!(std::abs(a) > 0.0)) throw DegenerateInputError("polygon has zero area");
  orientation_ = a > 0.0 ? Orientation::CCW : Orientation::CW;
}

double Polygon::signed_area() const { return textshape::signed_area(vertices_); }

double Polygon::area() const { return std::abs(signed_area()); }

Polygon Polygon::to_ccw() const {
  if (orientation_ == Orientation::CCW) return *this;
  std::vector<Point2> rev(vertices_.rbegin(), vertices_.rend());
  return Polygon(std::move(rev));
}

bool Polygon::contains(Point2 p) const { return point_in_ring(p, vertices_); }

BoundingBox bounding_box(std::span<const Point2> points) {
  if (points.empty()) return {};
  BoundingBox box{points[0], points[0]};
  for (const auto& p : points) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

bool point_in_ring(Point2 p, std::span<const Point2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int d1 = sign_of(orient2d(q1, q2, p1));
  const int d2 = sign_of(orient2d(q1, q2, p2));
  const int d3 = sign_of(orient2d(p1, p2, q1));
  const int d4 = sign_of(orient2d(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool is_simple(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  if (!(std::abs(signed_area(ring)) > 0.0)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a1 = ring[i];
    const Point2 a2 = ring[(i + 1) % n];
    if (a1 == a2) return false;
    // Adjacent edges may only share their common vertex: reject fold-backs.
    const Point2 a3 = ring[(i + 2) % n];
    if (orient2d(a1, a2, a3) == 0.0 && dot(a2 - a1, a3 - a2) < 0.0) return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a1, a2, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

NormalizedPoints normalize_points(std::span<const Point2> points) {
  if (points.size() < 2) throw DegenerateInputError("normalize_points needs at least 2 points");
  for (const auto& p : points) {
    if (!is_finite(p)) throw DegenerateInputError("non-finite point");
  }
  const BoundingBox box = bounding_box(points);
  const double extent = std::max(box.width(), box.height());
  if (!(extent > 0.0)) throw DegenerateInputError("all points are identical");

  NormalizedPoints out;
  out.transform = NormTransform{box.min, 1.0 / extent};
  out.points.reserve(points.size());
  for (const auto& p : points) {
    Point2 q = out.transform.apply(p);
    // Rounding can push the far edge a hair past 1.
    q.x = std::clamp(q.x, 0.0, 1.0);
    q.y = std::clamp(q.y, 0.0, 1.0);
    out.points.push_back(q);
  }
  return out;
}

Polygon denormalize_polygon(const Polygon& poly, const NormTransform& t) {
  std::vector<Point2> v;
  v.reserve(poly.size());
  for (const auto& q : poly.vertices()) v.push_back(t.invert(q));
  return Polygon(std::move(v));
}

NearestPoint nearest_point_on_ring(Point2 p, std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 2) throw DegenerateInputError("nearest point needs a ring with at least 2 vertices");

  Point2 best{};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    Point2 q = a;
    if (len2 > 0.0) {
      const double t = dot(p - a, ab) / len2;
      if (t >= 1.0) {
        q = b;
      } else if (t > 0.0) {
        q = lerp(a, b, t);
      }
    }
    const Point2 d = q - p;
    const double d2 = dot(d, d);
    const double tol = 1e-12 * std::max(d2, best_d2 == std::numeric_limits<double>::infinity() ? d2 : best_d2);
    if (d2 < best_d2 - tol) {
      best = q;
      best_d2 = d2;
    } else if (std::abs(d2 - best_d2) <= tol) {
      if (q.y < best.y || (q.y == best.y && q.x < best.x)) {
        best = q;
        best_d2 = std::min(best_d2, d2);
      }
    }
  }
  return {best, best.x - p.x, best.y - p.y};
}

NearestPoint nearest_point_on_polygon(Point2 p, const Polygon& poly) {
  return nearest_point_on_ring(p, poly.vertices());
}

double distance_to_ring(Point2 p, std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, distance(lerp(a, b, t), p));
  }
  return best;
}

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && orient2d(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point2& p = pts[i];
    while (k >= lower && orient2d(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

Polygon min_area_rect(std::span<const Point2> points) {
  const std::vector<Point2> hull = convex_hull(points);
  if (hull.size() < 3) throw DegenerateInputError("min_area_rect: points are collinear");

  double best_area = std::numeric_limits<double>::infinity();
  std::vector<Point2> best;
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = hull[(i + 1) % n] - hull[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point2 u{e.x / len, e.y / len};
    const Point2 v{-u.y, u.x};
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const auto& p : hull) {
      const double pu = dot(p, u);
      const double pv = dot(p, v);
      umin = std::min(umin, pu);
      umax = std::max(umax, pu);
      vmin = std::min(vmin, pv);
      vmax = std::max(vmax, pv);
    }
    const double area = (umax - umin) * (vmax - vmin);
    if (area < best_area) {
      best_area = area;
      best = {u * umin + v * vmin, u * umax + v * vmin, u * umax + v * vmax, u * umin + v * vmax};
    }
  }
  return Polygon(std::move(best));
}

Polygon min_area_rect(const Polygon& poly) { return min_area_rect(std::span<const Point2>(poly.vertices())); }

namespace {

std::vector<std::vector<std::pair<int, int>>> rasterize_runs(std::span<const Point2> ring, const ScanLattice& lat) {
  std::vector<std::vector<std::pair<int, int>>> rows(static_cast<std::size_t>(lat.rows));
  scan_convert(ring, lat, [&](int row, int first, int last) {
    rows[static_cast<std::size_t>(row)].emplace_back(first, last);
  });
  return rows;
}

long long run_length(const std::vector<std::pair<int, int>>& runs) {
  long long total = 0;
  for (const auto& [a, b] : runs) total += b - a;
  return total;
}

long long run_overlap(const std::vector<std::pair<int, int>>& a, const std::vector<std::pair<int, int>>& b) {
  long long total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int lo = std::max(a[i].first, b[j].first);
    const int hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

}  // namespace

double polygon_iou(const Polygon& a, const Polygon& b, int resolution) {
  if (resolution < 64) throw DegenerateInputError("polygon_iou: resolution must be >= 64");
  const BoundingBox ba = bounding_box(a.vertices());
  const BoundingBox bb = bounding_box(b.vertices());
  if (ba.max.x < bb.min.x || bb.max.x < ba.min.x || ba.max.y < bb.min.y || bb.max.y < ba.min.y) return 0.0;

  const BoundingBox joint{{std::min(ba.min.x, bb.min.x), std::min(ba.min.y, bb.min.y)},
                          {std::max(ba.max.x, bb.max.x), std::max(ba.max.y, bb.max.y)}};
  const double extent = std::max(joint.width(), joint.height());
  if (!(extent > 0.0)) return 0.0;

  ScanLattice lat;
  lat.origin = joint.min;
  lat.cell = extent / resolution;
  lat.columns = std::max(1, static_cast<int>(std::ceil(joint.width() / lat.cell)));
  lat.rows = std::max(1, static_cast<int>(std::ceil(joint.height() / lat.cell)));

  const auto ra = rasterize_runs(a.vertices(), lat);
  const auto rb = rasterize_runs(b.vertices(), lat);
  long long inter = 0, uni = 0;
  for (std::size_t r = 0; r < ra.size(); ++r) {
    const long long la = run_length(ra[r]);
    const long long lb = run_length(rb[r]);
    const long long ov = run_overlap(ra[r], rb[r]);
    inter += ov;
    uni += la + lb - ov;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Point2> remove_collinear(std::span<const Point2> ring, double tol) {
  std::vector<Point2> out(ring.begin(), ring.end());
  const BoundingBox box = bounding_box(ring);
  const double scale = std::max(box.width(), box.height());
  const double limit = tol * scale * scale;
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    std::vector<Point2> next;
    next.reserve(out.size());
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& prev = next.empty() ? out[(i + n - 1) % n] : next.back();
      const Point2& cur = out[i];
      const Point2& nxt = out[(i + 1) % n];
      if (std::abs(orient2d(prev, cur, nxt)) <= limit) {
        changed = true;
        continue;
      }
      next.push_back(cur);
    }
    if (next.size() < 3) break;
    out = std::move(next);
  }
  return out;
}

}  // namespace textshape
