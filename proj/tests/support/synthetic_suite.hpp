#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textshape/data_io.hpp"
#include "textshape/encode.hpp"

namespace textshape::testing {

struct SyntheticInstance {
  std::string name;
  std::string family;  // "axis", "rotated" or "arc"
  AnnotationPolygon annotation;
  ImageSize image;
};

/// Rectangle of size w x h centred at c, rotated by `angle` radians.
/// Upper chain runs along the top edge, lower along the bottom.
AnnotationPolygon make_rect(Point2 c, double w, double h, double angle);

/// Curved text band: centreline is an arc of radius r sweeping `sweep`
/// radians (<= pi), band height h, `per_side` vertices on each chain.
AnnotationPolygon make_arc(Point2 c, double r, double h, double sweep, int per_side, double rotation);

/// Translates the annotation so its bounding box sits `margin` pixels from
/// the top-left corner, and returns the image size that fits it.
ImageSize place(AnnotationPolygon& a, double margin);

/// The 200-instance roundtrip suite: 60 axis-aligned rectangles (aspect
/// 1:1 to 20:1), 72 rotated rectangles (0 to 170 degrees in 10 degree steps)
/// and 68 arcs (up to a half circle), one instance per image.
std::vector<SyntheticInstance> synthetic_suite(std::uint64_t seed = 20240607);

}  // namespace textshape::testing
