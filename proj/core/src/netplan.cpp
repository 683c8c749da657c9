#include "textshape/netplan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace textshape {

std::string to_string(const MapShape& s) { return std::to_string(s.height) + "x" + std::to_string(s.width); }

std::string StageShape::name() const { return "ch" + std::to_string(channel + 1) + "." + stage; }

bool FusionStep::inputs_aligned() const {
  return std::all_of(input_shapes.begin(), input_shapes.end(),
                     [&](const MapShape& s) { return s == input_shapes.front(); });
}

bool ShapePlan::aligned() const {
  if (!std::all_of(fusion_steps.begin(), fusion_steps.end(), [](const FusionStep& f) { return f.inputs_aligned(); })) {
    return false;
  }
  return channels.empty() || channels[0].empty() || fused_output() == channels[0][0].shape;
}

MapShape ShapePlan::fused_output() const { return fusion_steps.empty() ? MapShape{} : fusion_steps.back().output; }

namespace {

MapShape doubled(MapShape s) { return {s.height * 2, s.width * 2}; }

const char* kind_name(FusionKind k) {
  switch (k) {
    case FusionKind::Upsample:
      return "Upsample";
    case FusionKind::ConcatUpConv:
      return "Concat-UpConv";
    case FusionKind::Concat:
      return "Concat";
  }
  return "?";
}

}  // namespace

ShapePlan shape_plan(int height, int width, int n_channels, std::vector<int> stage_strides) {
  if (height <= 0 || width <= 0) throw PlanShapeError("input size must be positive");
  if (n_channels < 1) throw PlanShapeError("at least one channel is required");
  if (stage_strides.empty()) throw PlanShapeError("at least one backbone stage is required");
  for (std::size_t i = 0; i < stage_strides.size(); ++i) {
    if (stage_strides[i] <= 0 || (i > 0 && stage_strides[i] <= stage_strides[i - 1])) {
      throw PlanShapeError("stage strides must be positive and increasing");
    }
  }

  std::vector<std::string> offending;
  for (int k = 0; k < n_channels; ++k) {
    for (std::size_t s = stage_strides.size(); s-- > 0;) {
      const long long div = static_cast<long long>(stage_strides[s]) << k;
      if (height % div != 0 || width % div != 0) {
        offending.push_back("ch" + std::to_string(k + 1) + ".Conv" + std::to_string(s + 2) + " (stride " +
                            std::to_string(div) + ")");
      }
    }
  }
  if (!offending.empty()) {
    std::string msg = "input " + std::to_string(height) + "x" + std::to_string(width) + " is not divisible at ";
    for (std::size_t i = 0; i < offending.size(); ++i) msg += (i ? ", " : "") + offending[i];
    throw PlanShapeError(msg);
  }

  ShapePlan plan;
  plan.input = {height, width};
  for (int k = 0; k < n_channels; ++k) {
    std::vector<StageShape> stages;
    const int h = height >> k;
    const int w = width >> k;
    for (std::size_t s = 0; s < stage_strides.size(); ++s) {
      stages.push_back({k, "Conv" + std::to_string(s + 2), stage_strides[s],
                        {h / stage_strides[s], w / stage_strides[s]}});
    }
    plan.channels.push_back(std::move(stages));
  }

  const StageShape& deepest = plan.channels.back().back();
  FusionStep up;
  up.kind = FusionKind::Upsample;
  up.inputs = {deepest.name()};
  up.input_shapes = {deepest.shape};
  up.output = doubled(deepest.shape);
  plan.fusion_steps.push_back(up);

  std::vector<int> levels;
  for (const auto& ch : plan.channels) {
    for (const auto& st : ch) {
      if (&st != &deepest) levels.push_back(st.effective_stride());
    }
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::string carried = "up(" + deepest.name() + ")";
  MapShape carried_shape = up.output;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    FusionStep step;
    for (const auto& ch : plan.channels) {
      for (const auto& st : ch) {
        if (&st != &deepest && st.effective_stride() == levels[li]) {
          step.inputs.push_back(st.name());
          step.input_shapes.push_back(st.shape);
        }
      }
    }
    step.inputs.push_back(carried);
    step.input_shapes.push_back(carried_shape);
    const bool last = li + 1 == levels.size();
    step.kind = last ? FusionKind::Concat : FusionKind::ConcatUpConv;
    step.output = last ? step.input_shapes.front() : doubled(step.input_shapes.front());
    carried = "fuse" + std::to_string(li + 1);
    carried_shape = step.output;
    plan.fusion_steps.push_back(std::move(step));
  }
  return plan;
}

std::string format_plan(const ShapePlan& plan) {
  std::ostringstream os;
  os << "input " << to_string(plan.input) << ", " << plan.channels.size() << " channel(s)\n";
  os << "stages:\n";
  char line[160];
  for (const auto& ch : plan.channels) {
    for (const auto& st : ch) {
      std::snprintf(line, sizeof line, "  %-10s stride %3d (image %3d)  %s\n", st.name().c_str(), st.stride,
                    st.effective_stride(), to_string(st.shape).c_str());
      os << line;
    }
  }
  os << "fusion:\n";
  for (std::size_t i = 0; i < plan.fusion_steps.size(); ++i) {
    const auto& f = plan.fusion_steps[i];
    os << "  [" << i << "] " << kind_name(f.kind) << " {";
    for (std::size_t k = 0; k < f.inputs.size(); ++k) {
      os << (k ? ", " : "") << f.inputs[k] << " " << to_string(f.input_shapes[k]);
    }
    os << "} -> " << to_string(f.output) << (f.inputs_aligned() ? "" : "  MISALIGNED") << "\n";
  }
  os << "fused output " << to_string(plan.fused_output()) << (plan.aligned() ? "  aligned" : "  NOT aligned")
     << "\n";
  return os.str();
}

RealGrid upsample2x(const RealGrid& map) {
  if (map.empty()) throw ShapeMismatchError("upsample2x: empty input");
  const int w = map.width();
  const int h = map.height();
  RealGrid out(2 * w, 2 * h);

  auto source = [](int dst, int n, int& i0, int& i1, double& frac) {
    double src = (dst + 0.5) / 2.0 - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<int>(std::floor(src));
    i1 = std::min(i0 + 1, n - 1);
    frac = src - i0;
  };

  for (int y = 0; y < 2 * h; ++y) {
    int y0, y1;
    double fy;
    source(y, h, y0, y1, fy);
    for (int x = 0; x < 2 * w; ++x) {
      int x0, x1;
      double fx;
      source(x, w, x0, x1, fx);
      const double top = map(x0, y0) + (map(x1, y0) - map(x0, y0)) * fx;
      const double bottom = map(x0, y1) + (map(x1, y1) - map(x0, y1)) * fx;
      out(x, y) = top + (bottom - top) * fy;
    }
  }
  return out;
}

}  // namespace textshape
