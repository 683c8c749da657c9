#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "textshape/delaunay.hpp"
#include "textshape/geom.hpp"
#include "textshape/grid.hpp"
#include "textshape/raster.hpp"

namespace textshape {

/// A text annotation split into its upper and lower side chains, both
/// running from the start of the text to its end.
struct AnnotationPolygon {
  std::vector<Point2> upper;
  std::vector<Point2> lower;
  bool ignore = false;
  int source_vertex_count = 0;
  /// Transcription, when the source format carries one ("###" = don't care).
  std::string transcription;

  /// Closed ring: upper chain forward, then lower chain backward.
  std::vector<Point2> ring() const;
  Polygon polygon() const { return Polygon(ring()); }
};

/// Splits a vertex list given as "upper chain, then lower chain reversed".
/// Throws MalformedAnnotationError on odd counts, fewer than 4 vertices or a
/// self-intersecting ring.
AnnotationPolygon split_sides(std::span<const Point2> vertices, bool ignore = false);

/// Upper/lower vertex indices of one edge joining the two chains.
struct ChainLink {
  std::size_t upper;
  std::size_t lower;
};

/// Zip-merge of the chains by normalized arc length.
///
/// `links` starts with the start-end edge (upper[0], lower[0]) and ends with
/// (upper.back(), lower.back()); consecutive links share one vertex and bound
/// one triangle. Ties advance the upper chain.
std::vector<ChainLink> zip_chains(const AnnotationPolygon& a);

/// Triangles between consecutive zip links: two vertices on one chain, one on
/// the other. Zero-area triangles are skipped.
std::vector<Triangle> triangulate_annotation(const AnnotationPolygon& a);

/// Fraction of each chain-joining edge cut off at both ends to form the
/// central text region.
inline constexpr double kCentralInset = 0.25;

/// Central text region: on every chain-joining edge (end edges included) the
/// points at 25% of its length from each end, chained into a closed polygon.
Polygon central_region_polygon(const AnnotationPolygon& a);

/// Ground-truth rasters for one image. Distances are in image pixels and are
/// zero outside the mask.
struct LabelRaster {
  RasterGrid grid;
  Mask mask;
  RealGrid dist_x;
  RealGrid dist_y;
  Mask ignore_mask;

  explicit LabelRaster(const RasterGrid& g = {})
      : grid(g), mask(g.width, g.height), dist_x(g.width, g.height), dist_y(g.width, g.height),
        ignore_mask(g.width, g.height) {}
};

struct EncodeDiagnostics {
  std::size_t instances = 0;       // non-ignore annotations rasterized
  std::size_t ignored = 0;         // don't-care annotations
  std::size_t conflict_cells = 0;  // cells claimed by more than one central region
  std::size_t empty_regions = 0;   // central regions that covered no cell center
};

/// Central-region mask plus signed offsets from each mask cell center to the
/// nearest point on its annotation's full boundary. Cells claimed by several
/// central regions go to the annotation with the nearest boundary (ties: lower
/// index). Geometry outside the grid is clipped.
LabelRaster encode(std::span<const AnnotationPolygon> annotations, const RasterGrid& grid,
                   EncodeDiagnostics* diagnostics = nullptr);

}  // namespace textshape
