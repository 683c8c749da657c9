#include "textshape/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace textshape {

void PredictionRaster::validate() const {
  grid.validate();
  const RealGrid expected(grid.width, grid.height);
  require_same_shape(prob, expected, "prob vs grid");
  require_same_shape(dist_x, prob, "dist_x vs prob");
  require_same_shape(dist_y, prob, "dist_y vs prob");
  for (const double p : prob.data()) {
    if (!(p >= 0.0 && p <= 1.0)) throw DegenerateInputError("probability outside [0, 1]");
  }
}

PredictionRaster prediction_from_labels(const LabelRaster& labels) {
  PredictionRaster pred(labels.grid);
  for (std::size_t i = 0; i < labels.mask.size(); ++i) {
    pred.prob[i] = labels.mask[i] ? 1.0 : 0.0;
    pred.dist_x[i] = labels.dist_x[i];
    pred.dist_y[i] = labels.dist_y[i];
  }
  return pred;
}

void add_distance_noise(PredictionRaster& pred, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i = 0; i < pred.prob.size(); ++i) {
    if (pred.prob[i] <= 0.0) continue;
    pred.dist_x[i] += noise(rng);
    pred.dist_y[i] += noise(rng);
  }
}

int DecodeConfig::effective_min_cells(int stride) const {
  if (min_cells) return *min_cells;
  return std::max(1, 64 / std::max(1, stride * stride));
}

BoundaryOptions DecodeConfig::boundary_options() const {
  return {min_points, merge_radius, smooth_radius, smooth_gate};
}

Mask binarize(const RealGrid& prob, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw DegenerateInputError("binarize threshold must be in (0, 1)");
  Mask out(prob.width(), prob.height());
  for (std::size_t i = 0; i < prob.size(); ++i) out[i] = prob[i] >= threshold ? 1 : 0;
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<std::vector<std::size_t>> extract_instances(const Mask& mask, int min_cells) {
  const int w = mask.width();
  const int h = mask.height();
  // Two-pass labeling with union-find over the west and north neighbours.
  Grid2D<int> label(w, h, -1);
  std::vector<int> parent;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      const int west = x > 0 ? label(x - 1, y) : -1;
      const int north = y > 0 ? label(x, y - 1) : -1;
      if (west < 0 && north < 0) {
        label(x, y) = static_cast<int>(parent.size());
        parent.push_back(label(x, y));
      } else if (west >= 0 && north >= 0) {
        const int a = find_root(parent, west);
        const int b = find_root(parent, north);
        parent[std::max(a, b)] = std::min(a, b);
        label(x, y) = std::min(a, b);
      } else {
        label(x, y) = west >= 0 ? west : north;
      }
    }
  }

  std::vector<int> slot(parent.size(), -1);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] < 0) continue;
    const int root = find_root(parent, label[i]);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(slot[root])].push_back(i);
  }

  std::erase_if(components, [&](const auto& c) { return static_cast<int>(c.size()) < min_cells; });
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return components;
}

namespace {

// Raw points (cell center + offset) of a component, optionally replaced by
// gated neighborhood means. Order follows `component`.
std::vector<Point2> component_points(const std::vector<std::size_t>& component, const PredictionRaster& pred,
                                     int radius, double gate) {
  const auto w = static_cast<std::size_t>(pred.grid.width);
  std::vector<Point2> raw;
  raw.reserve(component.size());
  for (const std::size_t idx : component) {
    const int i = static_cast<int>(idx % w);
    const int j = static_cast<int>(idx / w);
    raw.push_back(pred.grid.cell_center(i, j) + Point2{pred.dist_x[idx], pred.dist_y[idx]});
  }
  if (radius <= 0) return raw;

  int x0 = pred.grid.width, y0 = pred.grid.height, x1 = -1, y1 = -1;
  for (const std::size_t idx : component) {
    const int i = static_cast<int>(idx % w);
    const int j = static_cast<int>(idx / w);
    x0 = std::min(x0, i);
    x1 = std::max(x1, i);
    y0 = std::min(y0, j);
    y1 = std::max(y1, j);
  }
  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;
  std::vector<int> local(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh), -1);
  for (std::size_t k = 0; k < component.size(); ++k) {
    const int i = static_cast<int>(component[k] % w) - x0;
    const int j = static_cast<int>(component[k] / w) - y0;
    local[static_cast<std::size_t>(j) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(i)] =
        static_cast<int>(k);
  }

  std::vector<Point2> out(raw.size());
  for (std::size_t k = 0; k < component.size(); ++k) {
    const Point2 p = raw[k];
    if (!is_finite(p)) {
      out[k] = p;
      continue;
    }
    const int ci = static_cast<int>(component[k] % w) - x0;
    const int cj = static_cast<int>(component[k] / w) - y0;
    Point2 sum{0.0, 0.0};
    int n = 0;
    for (int j = std::max(0, cj - radius); j <= std::min(bh - 1, cj + radius); ++j) {
      for (int i = std::max(0, ci - radius); i <= std::min(bw - 1, ci + radius); ++i) {
        const int other = local[static_cast<std::size_t>(j) * static_cast<std::size_t>(bw) + static_cast<std::size_t>(i)];
        if (other < 0) continue;
        const Point2 q = raw[static_cast<std::size_t>(other)];
        if (is_finite(q) && distance(p, q) <= gate) {
          sum = sum + q;
          ++n;
        }
      }
    }
    out[k] = sum * (1.0 / n);
  }
  return out;
}

}  // namespace

BoundaryPointSet boundary_points(const std::vector<std::size_t>& component, const PredictionRaster& pred,
                                 const BoundaryOptions& options, int instance_id) {
  if (component.empty()) throw InstanceRejected("empty component");
  const int w = pred.grid.width;
  const int min_points = options.min_points;
  const double merge_radius = options.merge_radius;
  const std::vector<Point2> points = component_points(component, pred, options.smooth_radius, options.smooth_gate);

  BoundaryPointSet out;
  out.instance_id = instance_id;
  double prob_sum = 0.0;

  // Spatial hash with merge_radius buckets; a point is merged into an
  // earlier one when they are closer than merge_radius.
  const double r = merge_radius > 0.0 ? merge_radius : 1.0;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  auto bucket_key = [](std::int64_t bx, std::int64_t by) {
    return (static_cast<std::uint64_t>(bx) << 32) ^ static_cast<std::uint64_t>(by & 0xffffffff);
  };

  for (std::size_t k = 0; k < component.size(); ++k) {
    prob_sum += pred.prob[component[k]];
    const Point2 p = points[k];
    if (!is_finite(p)) continue;

    const auto bx = static_cast<std::int64_t>(std::floor(p.x / r));
    const auto by = static_cast<std::int64_t>(std::floor(p.y / r));
    bool duplicate = false;
    if (merge_radius > 0.0) {
      for (std::int64_t dy = -1; dy <= 1 && !duplicate; ++dy) {
        for (std::int64_t dx = -1; dx <= 1 && !duplicate; ++dx) {
          const auto it = buckets.find(bucket_key(bx + dx, by + dy));
          if (it == buckets.end()) continue;
          for (const std::uint32_t k : it->second) {
            if (distance(out.points[k], p) < merge_radius) {
              duplicate = true;
              break;
            }
          }
        }
      }
    }
    if (duplicate) continue;
    buckets[bucket_key(bx, by)].push_back(static_cast<std::uint32_t>(out.points.size()));
    out.points.push_back(p);
  }

  out.score = prob_sum / static_cast<double>(component.size());
  const std::size_t step = (component.size() + kMaxAnchors - 1) / kMaxAnchors;
  for (std::size_t k = 0; k < component.size(); k += step) {
    const std::size_t idx = component[k];
    out.anchors.push_back(pred.grid.cell_center(static_cast<int>(idx % static_cast<std::size_t>(w)),
                                                static_cast<int>(idx / static_cast<std::size_t>(w))));
  }
  if (static_cast<int>(out.points.size()) < min_points) {
    throw InstanceRejected("instance has " + std::to_string(out.points.size()) + " boundary points, needs " +
                           std::to_string(min_points));
  }
  try {
    out.norm = normalize_points(out.points).transform;
  } catch (const DegenerateInputError& e) {
    throw InstanceRejected(e.what());
  }
  return out;
}

Detection reconstruct(const BoundaryPointSet& set, AlphaParam alpha, const AlphaFallback& fallback,
                      bool derive_quad, bool* used_hull) {
  std::vector<Point2> normalized;
  normalized.reserve(set.points.size());
  for (const auto& p : set.points) normalized.push_back(set.norm.apply(p));
  std::vector<Point2> anchors;
  anchors.reserve(set.anchors.size());
  for (const auto& p : set.anchors) anchors.push_back(set.norm.apply(p));

  try {
    const AlphaShapeResult shape = alpha_shape_with_fallback(normalized, alpha, fallback, anchors);
    if (used_hull) *used_hull = shape.convex_hull_fallback;
    Detection det;
    det.polygon = denormalize_polygon(shape.polygon, set.norm);
    det.score = set.score;
    if (derive_quad) det.quad = min_area_rect(det.polygon);
    return det;
  } catch (const DegenerateInputError& e) {
    throw InstanceRejected(std::string("reconstruction failed: ") + e.what());
  }
}

std::vector<Detection> decode(const PredictionRaster& pred, const DecodeConfig& cfg, DecodeDiagnostics* diagnostics) {
  pred.validate();
  DecodeDiagnostics diag;
  const AlphaParam alpha(cfg.alpha);

  const Mask mask = binarize(pred.prob, cfg.prob_threshold);
  const auto components = extract_instances(mask, cfg.effective_min_cells(pred.grid.stride));
  diag.components = components.size();

  std::vector<Detection> out;
  out.reserve(components.size());
  for (std::size_t k = 0; k < components.size(); ++k) {
    try {
      const BoundaryPointSet set =
          boundary_points(components[k], pred, cfg.boundary_options(), static_cast<int>(k));
      bool hull = false;
      out.push_back(reconstruct(set, alpha, cfg.fallback, cfg.derive_quads, &hull));
      if (hull) ++diag.hull_fallbacks;
    } catch (const InstanceRejected&) {
      ++diag.rejected;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) { return a.score > b.score; });

  if (diagnostics) *diagnostics = diag;
  return out;
}

}  // namespace textshape
