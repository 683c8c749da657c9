#include "textshape/raster.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace textshape {

RasterGrid RasterGrid::covering(int image_width, int image_height, int stride) {
  if (stride < 1) throw ShapeMismatchError("raster stride must be >= 1");
  if (image_width < 0 || image_height < 0) throw ShapeMismatchError("negative image size");
  return {(image_width + stride - 1) / stride, (image_height + stride - 1) / stride, stride};
}

void RasterGrid::validate() const {
  if (stride < 1) throw ShapeMismatchError("raster stride must be >= 1");
  if (width < 0 || height < 0) throw ShapeMismatchError("negative raster dimension");
}

void scan_convert(std::span<const Point2> ring, const ScanLattice& lat,
                  const std::function<void(int, int, int)>& emit) {
  const std::size_t n = ring.size();
  if (n < 3 || lat.rows <= 0 || lat.columns <= 0 || !(lat.cell > 0.0)) return;

  const BoundingBox box = bounding_box(ring);
  const int row_lo = std::max(0, static_cast<int>(std::floor((box.min.y - lat.origin.y) / lat.cell - 0.5)));
  const int row_hi = std::min(lat.rows - 1, static_cast<int>(std::ceil((box.max.y - lat.origin.y) / lat.cell - 0.5)));

  std::vector<double> xs;
  std::vector<std::pair<int, int>> runs;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double yc = lat.origin.y + (row + 0.5) * lat.cell;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2& a = ring[i];
      const Point2& b = ring[j];
      if ((a.y > yc) != (b.y > yc)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());

    runs.clear();
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Cell i is inside when its center lies in [x0, x1).
      int first = static_cast<int>(std::ceil((xs[k] - lat.origin.x) / lat.cell - 0.5));
      int last = static_cast<int>(std::ceil((xs[k + 1] - lat.origin.x) / lat.cell - 0.5));
      first = std::max(first, 0);
      last = std::min(last, lat.columns);
      if (last <= first) continue;
      if (!runs.empty() && runs.back().second >= first) {
        runs.back().second = std::max(runs.back().second, last);
      } else {
        runs.emplace_back(first, last);
      }
    }
    for (const auto& [first, last] : runs) emit(row, first, last);
  }
}

void fill_ring(std::span<const Point2> ring, const RasterGrid& grid, Mask& out, std::uint8_t value) {
  if (out.width() != grid.width || out.height() != grid.height) {
    throw ShapeMismatchError("fill_ring: target mask does not match the grid");
  }
  ScanLattice lat{{0.0, 0.0}, static_cast<double>(grid.stride), grid.width, grid.height};
  scan_convert(ring, lat, [&](int row, int first, int last) {
    for (int i = first; i < last; ++i) out(i, row) = value;
  });
}

}  // namespace textshape
