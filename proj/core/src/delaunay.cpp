#include "textshape/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace textshape {

namespace {

// Lattice resolution: coordinates become integers in [0, 2^30]. Differences
// then fit in 31 bits, orientation determinants in 62 bits and in-circle
// determinants in 124 bits, so both predicates are exact in int64 / int128.
constexpr double kLatticeSpan = 1073741824.0;
constexpr int kInfinite = -1;

using i64 = std::int64_t;
__extension__ typedef __int128 i128;
using Lattice = std::array<i64, 2>;

int orient(const Lattice& a, const Lattice& b, const Lattice& c) {
  const i64 v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  return (v > 0) - (v < 0);
}

/// Positive when d lies strictly inside the circle through CCW (a, b, c).
int incircle(const Lattice& a, const Lattice& b, const Lattice& c, const Lattice& d) {
  const i64 adx = a[0] - d[0], ady = a[1] - d[1];
  const i64 bdx = b[0] - d[0], bdy = b[1] - d[1];
  const i64 cdx = c[0] - d[0], cdy = c[1] - d[1];
  const i64 alift = adx * adx + ady * ady;
  const i64 blift = bdx * bdx + bdy * bdy;
  const i64 clift = cdx * cdx + cdy * cdy;
  const i128 det = static_cast<i128>(alift) * (bdx * cdy - cdx * bdy) +
                   static_cast<i128>(blift) * (cdx * ady - adx * cdy) +
                   static_cast<i128>(clift) * (adx * bdy - bdx * ady);
  return (det > 0) - (det < 0);
}

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0;
    const std::uint32_t ry = (y & s) > 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{};
  bool alive = true;

  int infinite_slot() const {
    for (int k = 0; k < 3; ++k) {
      if (v[k] == kInfinite) return k;
    }
    return -1;
  }
};

class Builder {
 public:
  explicit Builder(const std::vector<Lattice>& verts) : verts_(verts), start_of_(verts.size() + 1, -1) {}

  void run(const std::vector<int>& order) {
    std::size_t third = 2;
    while (third < order.size() && orient(verts_[order[0]], verts_[order[1]], verts_[order[third]]) == 0) {
      ++third;
    }
    if (third == order.size()) throw DegenerateInputError("delaunay: all points are collinear");

    int a = order[0], b = order[1], c = order[third];
    if (orient(verts_[a], verts_[b], verts_[c]) < 0) std::swap(a, b);
    seed(a, b, c);

    for (std::size_t i = 2; i < order.size(); ++i) {
      if (i == third) continue;
      insert(order[i]);
    }
  }

  const std::vector<Tri>& triangles() const { return tris_; }

 private:
  bool is_ghost(int t) const { return tris_[t].infinite_slot() >= 0; }

  bool in_conflict(int t, const Lattice& p) const {
    const Tri& tri = tris_[t];
    const int k = tri.infinite_slot();
    if (k < 0) return incircle(verts_[tri.v[0]], verts_[tri.v[1]], verts_[tri.v[2]], p) > 0;

    // Ghost triangle over hull edge a->b (outside on the left).
    const Lattice& a = verts_[tri.v[(k + 1) % 3]];
    const Lattice& b = verts_[tri.v[(k + 2) % 3]];
    const int o = orient(a, b, p);
    if (o != 0) return o > 0;
    const i64 ta = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
    const i64 tb = (p[0] - b[0]) * (a[0] - b[0]) + (p[1] - b[1]) * (a[1] - b[1]);
    return ta > 0 && tb > 0;
  }

  int allocate() {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      tris_[t] = Tri{};
      return t;
    }
    tris_.emplace_back();
    return static_cast<int>(tris_.size()) - 1;
  }

  void seed(int a, int b, int c) {
    // One real CCW triangle and a ghost across each of its edges.
    const int t = allocate();
    const int g_bc = allocate();
    const int g_ca = allocate();
    const int g_ab = allocate();
    tris_[t].v = {a, b, c};
    tris_[t].n = {g_bc, g_ca, g_ab};
    tris_[g_bc].v = {c, b, kInfinite};
    tris_[g_ca].v = {a, c, kInfinite};
    tris_[g_ab].v = {b, a, kInfinite};
    // Ghost (x, y, inf): slot 2 faces the real triangle, slot 0 the ghost
    // sharing edge (y, inf), slot 1 the ghost sharing edge (inf, x).
    tris_[g_bc].n = {g_ab, g_ca, t};
    tris_[g_ca].n = {g_bc, g_ab, t};
    tris_[g_ab].n = {g_ca, g_bc, t};
    last_ = t;
  }

  int locate(const Lattice& p) {
    int t = last_;
    if (is_ghost(t)) t = tris_[t].n[tris_[t].infinite_slot()];
    for (;;) {
      if (is_ghost(t)) return t;
      const Tri& tri = tris_[t];
      rng_ ^= rng_ << 13;
      rng_ ^= rng_ >> 7;
      rng_ ^= rng_ << 17;
      const int start = static_cast<int>(rng_ % 3);
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        const int i = (start + e) % 3;
        if (orient(verts_[tri.v[(i + 1) % 3]], verts_[tri.v[(i + 2) % 3]], p) < 0) {
          next = tri.n[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
  }

  struct BoundaryEdge {
    int a;
    int b;
    int outer;
    int outer_slot;
  };

  void insert(int pi) {
    const Lattice& p = verts_[pi];
    const int t0 = locate(p);

    ++stamp_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    cavity_.clear();
    boundary_.clear();
    cavity_.push_back(t0);
    mark_[t0] = stamp_;
    for (std::size_t head = 0; head < cavity_.size(); ++head) {
      const int t = cavity_[head];
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (mark_[nb] == stamp_) continue;
        if (in_conflict(nb, p)) {
          mark_[nb] = stamp_;
          cavity_.push_back(nb);
        } else {
          const auto& nn = tris_[nb].n;
          const int slot = nn[0] == t ? 0 : (nn[1] == t ? 1 : 2);
          boundary_.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb, slot});
        }
      }
    }

    for (const int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }

    created_.clear();
    for (const auto& e : boundary_) {
      const int t = allocate();
      if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
      tris_[t].v = {e.a, e.b, pi};
      tris_[t].n = {-1, -1, e.outer};
      tris_[e.outer].n[e.outer_slot] = t;
      start_of_[static_cast<std::size_t>(e.a + 1)] = t;
      created_.push_back(t);
    }
    for (const int t : created_) {
      const int b = tris_[t].v[1];
      const int succ = start_of_[static_cast<std::size_t>(b + 1)];
      tris_[t].n[0] = succ;
      tris_[succ].n[1] = t;
      if (!is_ghost(t)) last_ = t;
    }
  }

  const std::vector<Lattice>& verts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> start_of_;  // indexed by vertex + 1 so the infinite vertex fits
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
  std::vector<int> cavity_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> created_;
  int last_ = 0;
  std::uint64_t rng_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace

double circumradius(Point2 a, Point2 b, Point2 c) {
  const double twice_area = std::abs(orient2d(a, b, c));
  if (!(twice_area > 0.0)) return std::numeric_limits<double>::infinity();
  return distance(a, b) * distance(b, c) * distance(c, a) / (2.0 * twice_area);
}

Triangle make_triangle(Point2 a, Point2 b, Point2 c) { return {a, b, c, circumradius(a, b, c)}; }

Triangle DelaunayMesh::triangle(std::size_t t) const {
  const auto& v = triangles[t];
  return make_triangle(points[v[0]], points[v[1]], points[v[2]]);
}

double DelaunayMesh::circumradius(std::size_t t) const {
  const auto& v = triangles[t];
  return textshape::circumradius(points[v[0]], points[v[1]], points[v[2]]);
}

int DelaunayMesh::orientation(int a, int b, int c) const { return orient(lattice[a], lattice[b], lattice[c]); }

DelaunayMesh delaunay_mesh(std::span<const Point2> input) {
  for (const auto& p : input) {
    if (!is_finite(p)) throw DegenerateInputError("delaunay: non-finite point");
  }
  if (input.size() < 3) throw DegenerateInputError("delaunay: fewer than 3 points");

  const BoundingBox box = bounding_box(input);
  const double extent = std::max(box.width(), box.height());
  if (!(extent > 0.0)) throw DegenerateInputError("delaunay: all points coincide");
  const double to_lattice = kLatticeSpan / extent;

  std::vector<Lattice> snapped(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    snapped[i] = {static_cast<i64>(std::llround((input[i].x - box.min.x) * to_lattice)),
                  static_cast<i64>(std::llround((input[i].y - box.min.y) * to_lattice))};
  }

  // Deduplicate on lattice nodes, keeping the first occurrence in input order.
  std::vector<std::size_t> idx(input.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return snapped[a] < snapped[b]; });
  std::vector<std::size_t> keep;
  keep.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k == 0 || snapped[idx[k]] != snapped[idx[k - 1]]) keep.push_back(idx[k]);
  }
  std::sort(keep.begin(), keep.end());
  if (keep.size() < 3) throw DegenerateInputError("delaunay: fewer than 3 distinct points");

  DelaunayMesh mesh;
  mesh.points.reserve(keep.size());
  mesh.lattice.reserve(keep.size());
  for (const std::size_t i : keep) {
    mesh.points.push_back(input[i]);
    mesh.lattice.push_back(snapped[i]);
  }

  std::vector<std::uint64_t> key(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    key[i] = hilbert_index(static_cast<std::uint32_t>(mesh.lattice[i][0] >> 14),
                           static_cast<std::uint32_t>(mesh.lattice[i][1] >> 14));
  }
  std::vector<int> order(keep.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });

  Builder builder(mesh.lattice);
  builder.run(order);

  const auto& tris = builder.triangles();
  std::vector<int> remap(tris.size(), -1);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (tris[t].alive && tris[t].infinite_slot() < 0) {
      remap[t] = static_cast<int>(mesh.triangles.size());
      mesh.triangles.push_back(tris[t].v);
    }
  }
  mesh.neighbors.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (remap[t] < 0) continue;
    auto& nb = mesh.neighbors[static_cast<std::size_t>(remap[t])];
    for (int k = 0; k < 3; ++k) nb[k] = remap[static_cast<std::size_t>(tris[t].n[k])];
  }
  return mesh;
}

std::vector<Triangle> delaunay(std::span<const Point2> points) {
  const DelaunayMesh mesh = delaunay_mesh(points);
  std::vector<Triangle> out;
  out.reserve(mesh.size());
  for (std::size_t t = 0; t < mesh.size(); ++t) out.push_back(mesh.triangle(t));
  return out;
}

}  // namespace textshape
