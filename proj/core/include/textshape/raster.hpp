#pragma once

#include <functional>
#include <span>

#include "textshape/geom.hpp"
#include "textshape/grid.hpp"

namespace textshape {

/// Label / prediction raster geometry. Cell (i, j) covers image pixels
/// [i*stride, (i+1)*stride) x [j*stride, (j+1)*stride).
struct RasterGrid {
  int width = 0;
  int height = 0;
  int stride = 1;

  Point2 cell_center(int i, int j) const {
    return {(i + 0.5) * stride, (j + 0.5) * stride};
  }

  /// Smallest grid of the given stride covering a width x height image.
  static RasterGrid covering(int image_width, int image_height, int stride);

  void validate() const;

  friend bool operator==(const RasterGrid&, const RasterGrid&) = default;
};

/// Uniform square-cell lattice used by the scan converter. Cell (i, j) has its
/// center at origin + ((i + 0.5) * cell, (j + 0.5) * cell).
struct ScanLattice {
  Point2 origin;
  double cell = 1.0;
  int columns = 0;
  int rows = 0;
};

/// Calls `emit(row, first, last)` for every maximal run of cells [first, last)
/// whose centers lie inside the ring (even-odd rule). Runs within a row are
/// emitted left to right.
void scan_convert(std::span<const Point2> ring, const ScanLattice& lattice,
                  const std::function<void(int row, int first, int last)>& emit);

/// Convenience: marks the cells of `grid` whose centers are inside the ring.
void fill_ring(std::span<const Point2> ring, const RasterGrid& grid, Mask& out, std::uint8_t value = 1);

}  // namespace textshape
