#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "textshape/alpha_shape.hpp"
#include "textshape/encode.hpp"
#include "textshape/geom.hpp"
#include "textshape/grid.hpp"
#include "textshape/raster.hpp"

namespace textshape {

/// Network-style output: text probability and regressed offsets per cell.
struct PredictionRaster {
  RasterGrid grid;
  RealGrid prob;
  RealGrid dist_x;
  RealGrid dist_y;

  explicit PredictionRaster(const RasterGrid& g = {})
      : grid(g), prob(g.width, g.height), dist_x(g.width, g.height), dist_y(g.width, g.height) {}

  /// Throws ShapeMismatchError / DegenerateInputError on violated invariants.
  void validate() const;
};

/// A perfect prediction: probability 1 on the label mask, label offsets.
PredictionRaster prediction_from_labels(const LabelRaster& labels);

/// Adds N(0, sigma) noise to both offset maps on cells with prob > 0.
/// Deterministic for a given seed.
void add_distance_noise(PredictionRaster& pred, double sigma, std::uint64_t seed);

struct BoundaryPointSet {
  std::vector<Point2> points;  // image pixels
  /// Cell centers of the component (at most kMaxAnchors, evenly subsampled);
  /// the reconstructed polygon has to cover them.
  std::vector<Point2> anchors;
  NormTransform norm;
  int instance_id = 0;
  double score = 0.0;
};

struct Detection {
  Polygon polygon;
  std::optional<Polygon> quad;
  double score = 0.0;
};

struct BoundaryOptions {
  int min_points = 8;
  double merge_radius = 0.5;
  /// Each cell's point is replaced by the mean of the points of component
  /// cells within this many cells (Chebyshev), counting only points within
  /// `smooth_gate` pixels of its own. 0 disables smoothing.
  int smooth_radius = 1;
  double smooth_gate = 6.0;
};

inline constexpr std::size_t kMaxAnchors = 512;

struct DecodeConfig {
  double prob_threshold = 0.5;
  double alpha = kDefaultAlpha;
  int min_points = 8;
  int smooth_radius = 1;
  double smooth_gate = 6.0;
  /// Smallest component kept; unset derives 64 / stride^2 (64 at stride 1,
  /// 4 at stride 4).
  std::optional<int> min_cells;
  /// Points closer than this (image pixels) to an earlier point are dropped.
  double merge_radius = 0.5;
  bool derive_quads = false;
  AlphaFallback fallback{4, 2.0, 0.9};

  int effective_min_cells(int stride) const;
  BoundaryOptions boundary_options() const;
};

struct DecodeDiagnostics {
  std::size_t components = 0;
  std::size_t rejected = 0;
  std::size_t hull_fallbacks = 0;
};

Mask binarize(const RealGrid& prob, double threshold);

/// 4-connected components as row-major cell indices, largest first (ties by
/// first cell). Components with fewer than `min_cells` cells are dropped.
std::vector<std::vector<std::size_t>> extract_instances(const Mask& mask, int min_cells);


/// Regressed boundary points (cell center + offset) of one component.
/// Throws InstanceRejected when fewer than `min_points` survive merging.
BoundaryPointSet boundary_points(const std::vector<std::size_t>& component, const PredictionRaster& pred,
                                 const BoundaryOptions& options = {}, int instance_id = 0);

/// Normalize, alpha-shape (with fallback) and map back to image pixels.
/// Throws InstanceRejected when no polygon can be formed.
Detection reconstruct(const BoundaryPointSet& points, AlphaParam alpha, const AlphaFallback& fallback = {},
                      bool derive_quad = false, bool* used_hull = nullptr);

/// Full pipeline, detections sorted by score descending.
std::vector<Detection> decode(const PredictionRaster& pred, const DecodeConfig& cfg = {},
                              DecodeDiagnostics* diagnostics = nullptr);

}  // namespace textshape
