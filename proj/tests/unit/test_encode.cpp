#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "synthetic_suite.hpp"
#include "textshape/encode.hpp"

using namespace textshape;

namespace {

AnnotationPolygon rect_annotation() {
  const std::vector<Point2> v{{0, 0}, {100, 0}, {100, 40}, {0, 40}};
  return split_sides(v);
}

// 7 + 7 vertex curved line in the dataset convention.
std::vector<Point2> ctw_line() {
  std::vector<Point2> upper, lower;
  for (int i = 0; i < 7; ++i) {
    const double t = std::numbers::pi * (0.2 + 0.6 * i / 6.0);
    upper.push_back({200 - 150 * std::cos(t), 200 - 150 * std::sin(t)});
    lower.push_back({200 - 110 * std::cos(t), 200 - 110 * std::sin(t)});
  }
  std::vector<Point2> v = upper;
  v.insert(v.end(), lower.rbegin(), lower.rend());
  return v;
}

double total_area(const std::vector<Triangle>& tris) {
  double a = 0.0;
  for (const auto& t : tris) a += 0.5 * std::abs(orient2d(t.a, t.b, t.c));
  return a;
}

}  // namespace

TEST(SplitSides, Rectangle) {
  const AnnotationPolygon a = rect_annotation();
  EXPECT_EQ(a.upper, (std::vector<Point2>{{0, 0}, {100, 0}}));
  EXPECT_EQ(a.lower, (std::vector<Point2>{{0, 40}, {100, 40}}));
  EXPECT_EQ(a.source_vertex_count, 4);
  EXPECT_EQ(a.ring(), (std::vector<Point2>{{0, 0}, {100, 0}, {100, 40}, {0, 40}}));
}

TEST(SplitSides, FourteenVertexLine) {
  const AnnotationPolygon a = split_sides(ctw_line());
  EXPECT_EQ(a.upper.size(), 7u);
  EXPECT_EQ(a.lower.size(), 7u);
}

TEST(SplitSides, SixVertexArc) {
  const std::vector<Point2> v{{0, 10}, {50, 0}, {100, 10}, {90, 40}, {50, 30}, {10, 40}};
  const AnnotationPolygon a = split_sides(v);
  EXPECT_EQ(a.upper.size(), 3u);
  EXPECT_EQ(a.lower, (std::vector<Point2>{{10, 40}, {50, 30}, {90, 40}}));
}

TEST(SplitSides, RejectsMalformed) {
  EXPECT_THROW(split_sides(std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 2}}), MalformedAnnotationError);
  EXPECT_THROW(split_sides(std::vector<Point2>{{0, 0}, {1, 1}}), MalformedAnnotationError);
  EXPECT_THROW(split_sides(std::vector<Point2>{{0, 0}, {10, 10}, {10, 0}, {0, 10}}), MalformedAnnotationError);
}

TEST(Triangulate, RectangleTwoTriangles) {
  const auto tris = triangulate_annotation(rect_annotation());
  EXPECT_EQ(tris.size(), 2u);
  EXPECT_NEAR(total_area(tris), 4000.0, 1e-9);
}

TEST(Triangulate, TriangleCountFormula) {
  EXPECT_EQ(triangulate_annotation(split_sides(ctw_line())).size(), 12u);
  AnnotationPolygon a;
  a.upper = {{0, 0}, {100, 0}};
  a.lower = {{0, 40}, {50, 45}, {100, 40}};
  EXPECT_EQ(triangulate_annotation(a).size(), 3u);
}

TEST(Triangulate, TilesTheAnnotation) {
  for (const auto& s : textshape::testing::synthetic_suite()) {
    const auto tris = triangulate_annotation(s.annotation);
    const double expected = std::abs(oracle::shoelace(s.annotation.ring()));
    EXPECT_NEAR(total_area(tris), expected, 1e-6 * expected) << s.name;
  }
}

TEST(Triangulate, EveryTriangleStraddlesTheChains) {
  const AnnotationPolygon a = split_sides(ctw_line());
  const auto links = zip_chains(a);
  ASSERT_EQ(links.size(), a.upper.size() + a.lower.size() - 1);
  EXPECT_EQ(links.front().upper, 0u);
  EXPECT_EQ(links.front().lower, 0u);
  EXPECT_EQ(links.back().upper, a.upper.size() - 1);
  EXPECT_EQ(links.back().lower, a.lower.size() - 1);
  for (std::size_t k = 1; k < links.size(); ++k) {
    const bool upper_step = links[k].upper == links[k - 1].upper + 1 && links[k].lower == links[k - 1].lower;
    const bool lower_step = links[k].lower == links[k - 1].lower + 1 && links[k].upper == links[k - 1].upper;
    EXPECT_TRUE(upper_step != lower_step);
  }
}

TEST(CentralRegion, RectangleHandConstruction) {
  const Polygon c = central_region_polygon(rect_annotation());
  const std::vector<Point2> expected{{0, 10}, {75, 10}, {100, 10}, {100, 30}, {25, 30}, {0, 30}};
  ASSERT_EQ(c.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(c[i].x, expected[i].x, 1e-12);
    EXPECT_NEAR(c[i].y, expected[i].y, 1e-12);
  }
}

TEST(CentralRegion, ShrinksAndStaysInside) {
  for (const auto& s : textshape::testing::synthetic_suite()) {
    const auto ring = s.annotation.ring();
    const Polygon c = central_region_polygon(s.annotation);
    EXPECT_LT(c.area(), std::abs(oracle::shoelace(ring))) << s.name;
    for (const auto& v : c.vertices()) {
      EXPECT_TRUE(oracle::inside(ring, v) || oracle::segment_distance(ring, v) < 1e-9) << s.name;
    }
    const auto overlap = oracle::raster_overlap(c.vertices(), ring, 256);
    EXPECT_GE(overlap.intersection / overlap.area_a, 0.999) << s.name;
  }
}

TEST(Encode, RectangleAtStrideOne) {
  const AnnotationPolygon a = rect_annotation();
  const RasterGrid grid{110, 50, 1};
  EncodeDiagnostics diag;
  const LabelRaster lab = encode(std::span(&a, 1), grid, &diag);
  EXPECT_EQ(diag.instances, 1u);
  const Polygon central = central_region_polygon(a);
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const bool in = oracle::inside(central.vertices(), grid.cell_center(i, j));
      EXPECT_EQ(lab.mask(i, j) != 0, in) << i << "," << j;
      if (!in) {
        EXPECT_EQ(lab.dist_x(i, j), 0.0);
        EXPECT_EQ(lab.dist_y(i, j), 0.0);
      }
    }
  }
  EXPECT_DOUBLE_EQ(lab.dist_x(50, 15), 0.0);
  EXPECT_DOUBLE_EQ(lab.dist_y(50, 15), -15.5);
}

TEST(Encode, EmptyListGivesZeroRasters) {
  const LabelRaster lab = encode({}, RasterGrid{20, 10, 1});
  for (std::size_t i = 0; i < lab.mask.size(); ++i) {
    EXPECT_EQ(lab.mask[i], 0);
    EXPECT_EQ(lab.ignore_mask[i], 0);
    EXPECT_EQ(lab.dist_x[i], 0.0);
  }
}

TEST(Encode, IgnoreQuadOnlyMarksIgnoreMask) {
  AnnotationPolygon a = rect_annotation();
  a.ignore = true;
  EncodeDiagnostics diag;
  const LabelRaster lab = encode(std::span(&a, 1), RasterGrid{110, 50, 1}, &diag);
  EXPECT_EQ(diag.ignored, 1u);
  EXPECT_EQ(diag.instances, 0u);
  for (int j = 0; j < 50; ++j) {
    for (int i = 0; i < 110; ++i) {
      EXPECT_EQ(lab.mask(i, j), 0);
      EXPECT_EQ(lab.ignore_mask(i, j) != 0, oracle::inside(a.ring(), {i + 0.5, j + 0.5}));
    }
  }
}

TEST(Encode, BoundaryConsistencyAndMinimality) {
  for (const int stride : {1, 4}) {
    for (const auto& s : textshape::testing::synthetic_suite()) {
      const RasterGrid grid = RasterGrid::covering(s.image.width, s.image.height, stride);
      const LabelRaster lab = encode(std::span(&s.annotation, 1), grid);
      const auto ring = s.annotation.ring();
      std::size_t cells = 0;
      for (int j = 0; j < grid.height; ++j) {
        for (int i = 0; i < grid.width; ++i) {
          if (!lab.mask(i, j)) continue;
          ++cells;
          const Point2 c = grid.cell_center(i, j);
          const Point2 b = c + Point2{lab.dist_x(i, j), lab.dist_y(i, j)};
          ASSERT_LT(oracle::segment_distance(ring, b), 1e-6) << s.name;
          const double d = std::hypot(lab.dist_x(i, j), lab.dist_y(i, j));
          for (const auto& v : ring) ASSERT_LE(d, distance(c, v) + 1e-9);
          ASSERT_NEAR(d, oracle::segment_distance(ring, c), 1e-9);
        }
      }
      EXPECT_GT(cells, 0u) << s.name << " stride " << stride;
    }
  }
}

TEST(Encode, SeparatedAnnotationsGiveSeparateComponents) {
  // Two 40 px tall lines with a 24 px gap (60% of the height).
  const std::vector<AnnotationPolygon> anns{split_sides(std::vector<Point2>{{10, 10}, {300, 10}, {300, 50}, {10, 50}}),
                                            split_sides(std::vector<Point2>{{10, 74}, {300, 74}, {300, 114}, {10, 114}})};
  const LabelRaster lab = encode(anns, RasterGrid{320, 130, 1});
  EXPECT_EQ(oracle::flood_fill(lab.mask).size(), 2u);
}

TEST(Encode, OverlapGoesToNearestBoundary) {
  const std::vector<AnnotationPolygon> anns{split_sides(std::vector<Point2>{{0, 0}, {100, 0}, {100, 40}, {0, 40}}),
                                            split_sides(std::vector<Point2>{{0, 10}, {100, 10}, {100, 60}, {0, 60}})};
  EncodeDiagnostics diag;
  const LabelRaster lab = encode(anns, RasterGrid{110, 70, 1}, &diag);
  EXPECT_GT(diag.conflict_cells, 0u);
  const auto r0 = anns[0].ring();
  const auto r1 = anns[1].ring();
  for (int j = 0; j < 70; ++j) {
    for (int i = 0; i < 110; ++i) {
      if (!lab.mask(i, j)) continue;
      const Point2 c{i + 0.5, j + 0.5};
      const double d = std::hypot(lab.dist_x(i, j), lab.dist_y(i, j));
      const bool in0 = oracle::inside(central_region_polygon(anns[0]).vertices(), c);
      const bool in1 = oracle::inside(central_region_polygon(anns[1]).vertices(), c);
      if (in0 && in1) {
        EXPECT_NEAR(d, std::min(oracle::segment_distance(r0, c), oracle::segment_distance(r1, c)), 1e-9);
      }
    }
  }
}

TEST(Encode, GeometryOutsideTheGridIsClipped) {
  const AnnotationPolygon a = split_sides(std::vector<Point2>{{-50, 5}, {80, 5}, {80, 45}, {-50, 45}});
  const LabelRaster lab = encode(std::span(&a, 1), RasterGrid{40, 30, 1});
  std::size_t on = 0;
  for (std::size_t i = 0; i < lab.mask.size(); ++i) on += lab.mask[i];
  EXPECT_GT(on, 0u);
}
