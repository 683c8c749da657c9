#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "textshape/delaunay.hpp"

using namespace textshape;

namespace {

std::vector<Point2> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
  return pts;
}

double mesh_area(const DelaunayMesh& m) {
  double a = 0.0;
  for (const auto& t : m.triangles) a += 0.5 * orient2d(m.points[t[0]], m.points[t[1]], m.points[t[2]]);
  return a;
}

void expect_valid(const DelaunayMesh& m) {
  EXPECT_LE(oracle::worst_circumcircle_intrusion(m.points, m.triangles), 1e-7L);
  EXPECT_NEAR(mesh_area(m), oracle::shoelace(oracle::jarvis_hull(m.points)), 1e-9);
  for (std::size_t t = 0; t < m.size(); ++t) {
    EXPECT_EQ(m.orientation(m.triangles[t][0], m.triangles[t][1], m.triangles[t][2]), 1);
  }
}

}  // namespace

TEST(Delaunay, SingleRightTriangle) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}};
  const auto tris = delaunay(pts);
  ASSERT_EQ(tris.size(), 1u);
  EXPECT_NEAR(tris[0].circumradius, std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(Delaunay, UnitSquareEitherDiagonal) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const DelaunayMesh m = delaunay_mesh(pts);
  ASSERT_EQ(m.size(), 2u);
  for (std::size_t t = 0; t < 2; ++t) EXPECT_NEAR(m.circumradius(t), std::sqrt(2.0) / 2.0, 1e-12);
  expect_valid(m);
}

TEST(Delaunay, RandomPointsHaveEmptyCircumcircles) {
  expect_valid(delaunay_mesh(random_points(200, 1)));
}

TEST(Delaunay, BruteForceOracleUpTo300Points) {
  for (std::size_t n : {3u, 4u, 5u, 10u, 31u, 64u, 127u, 300u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      SCOPED_TRACE("n=" + std::to_string(n) + " seed=" + std::to_string(seed));
      auto pts = random_points(n, 100 + seed * 7 + n);
      if (n == 3) pts = {{0.1, 0.2}, {0.9, 0.3}, {0.4, 0.8}};
      expect_valid(delaunay_mesh(pts));
    }
  }
}

TEST(Delaunay, CocircularGrid) {
  std::vector<Point2> pts;
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i < 12; ++i) pts.push_back({i / 11.0, j / 11.0});
  }
  const DelaunayMesh m = delaunay_mesh(pts);
  EXPECT_EQ(m.size(), 2u * 11u * 11u);
  expect_valid(m);
}

TEST(Delaunay, ManyCollinearPointsPlusOne) {
  std::vector<Point2> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({i / 49.0, 0.0});
  pts.push_back({0.5, 0.3});
  const DelaunayMesh m = delaunay_mesh(pts);
  EXPECT_EQ(m.size(), 49u);
  expect_valid(m);
}

TEST(Delaunay, PointsOnACircle) {
  std::vector<Point2> pts;
  for (int i = 0; i < 40; ++i) {
    const double t = 2 * 3.14159265358979323846 * i / 40;
    pts.push_back({0.5 + 0.5 * std::cos(t), 0.5 + 0.5 * std::sin(t)});
  }
  pts.push_back({0.5, 0.5});
  expect_valid(delaunay_mesh(pts));
}

TEST(Delaunay, DuplicatesAreRemoved) {
  std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}, {1, 0}, {0, 0}, {1, 1}};
  const DelaunayMesh m = delaunay_mesh(pts);
  EXPECT_EQ(m.points.size(), 4u);
  EXPECT_EQ(m.size(), 2u);
}

TEST(Delaunay, DegenerateInputThrows) {
  EXPECT_THROW(delaunay(std::vector<Point2>{{0, 0}, {1, 1}}), DegenerateInputError);
  EXPECT_THROW(delaunay(std::vector<Point2>{{0, 0}, {0, 0}, {0, 0}, {1, 1}}), DegenerateInputError);
  EXPECT_THROW(delaunay(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}}), DegenerateInputError);
}

TEST(Delaunay, CircumradiusMatchesFormula) {
  const DelaunayMesh m = delaunay_mesh(random_points(150, 9));
  for (std::size_t t = 0; t < m.size(); ++t) {
    const Triangle tri = m.triangle(t);
    const double a = distance(tri.b, tri.c), b = distance(tri.a, tri.c), c = distance(tri.a, tri.b);
    const double area2 = std::abs(orient2d(tri.a, tri.b, tri.c));
    ASSERT_GT(area2, 0.0);
    const double expected = a * b * c / (2.0 * area2);
    EXPECT_NEAR(tri.circumradius, expected, 1e-9 * expected);
  }
}

TEST(Delaunay, NeighborsAreSymmetric) {
  const DelaunayMesh m = delaunay_mesh(random_points(120, 4));
  std::size_t hull_edges = 0;
  for (std::size_t t = 0; t < m.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int n = m.neighbors[t][k];
      if (n < 0) {
        ++hull_edges;
        continue;
      }
      const auto& nb = m.neighbors[static_cast<std::size_t>(n)];
      EXPECT_TRUE(nb[0] == static_cast<int>(t) || nb[1] == static_cast<int>(t) || nb[2] == static_cast<int>(t));
    }
  }
  EXPECT_EQ(hull_edges, oracle::jarvis_hull(m.points).size());
}

TEST(Delaunay, DeterministicAcrossRuns) {
  const auto pts = random_points(250, 42);
  const DelaunayMesh a = delaunay_mesh(pts);
  const DelaunayMesh b = delaunay_mesh(pts);
  EXPECT_EQ(a.triangles, b.triangles);
}
