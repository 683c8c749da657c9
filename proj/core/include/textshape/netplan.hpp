#pragma once

#include <string>
#include <vector>

#include "textshape/grid.hpp"

namespace textshape {

struct MapShape {
  int height = 0;
  int width = 0;

  friend bool operator==(const MapShape&, const MapShape&) = default;
};

std::string to_string(const MapShape& s);

/// Output of one backbone stage of one input-scale channel.
struct StageShape {
  int channel = 0;      // 0 = full-resolution input, k = input downsampled by 2^k
  std::string stage;    // "Conv2" .. "Conv5"
  int stride = 0;       // backbone stride relative to this channel's input
  MapShape shape;

  /// Stride relative to the original image.
  int effective_stride() const { return stride << channel; }
  std::string name() const;
};

enum class FusionKind {
  Upsample,      // x2 resampling of the deepest map
  ConcatUpConv,  // concatenate same-scale maps, then x2 upsample
  Concat,        // final concatenation at the finest scale, no upsampling
};

struct FusionStep {
  FusionKind kind = FusionKind::ConcatUpConv;
  std::vector<std::string> inputs;
  std::vector<MapShape> input_shapes;
  MapShape output;

  bool inputs_aligned() const;
};

struct ShapePlan {
  MapShape input;
  std::vector<std::vector<StageShape>> channels;
  std::vector<FusionStep> fusion_steps;

  /// Every fusion step's inputs share a spatial shape.
  bool aligned() const;
  MapShape fused_output() const;
};

/// Shapes of the multi-channel, multi-stage fusion network.
///
/// Channel k sees the input downsampled by 2^k. The deepest map (last stage of
/// the last channel) is upsampled x2; then, from coarse to fine, each step
/// concatenates the carried map with every stage output of that effective
/// stride and upsamples x2, except the finest step, which stays at channel 0's
/// first stage. Throws PlanShapeError naming every stage whose input size is
/// not divisible by its stride, deepest first.
ShapePlan shape_plan(int height, int width, int n_channels = 2, std::vector<int> stage_strides = {4, 8, 16, 32});

/// Printable stage and fusion table.
std::string format_plan(const ShapePlan& plan);

/// Bilinear x2 upsampling, align-corners-false (half-pixel centers, edge clamp).
RealGrid upsample2x(const RealGrid& map);

}  // namespace textshape
