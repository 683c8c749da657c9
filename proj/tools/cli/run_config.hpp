#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "textshape/decode.hpp"
#include "textshape/evalkit.hpp"
#include "textshape/losses.hpp"

namespace textshape::cli {

/// Every knob a command may use. Serialized as run_config.json next to
/// each command's output.
struct RunConfig {
  int stride = 1;
  double alpha = kDefaultAlpha;
  double prob_threshold = 0.5;
  double iou_threshold = 0.5;
  EvalMode mode = EvalMode::Polygon;
  int min_points = 8;
  std::optional<int> min_cells;
  int smooth_radius = 1;
  double smooth_gate = 6.0;
  double lambda = 1.0;
  double dice_epsilon = 1.0;
  double smooth_l1_delta = 1.0;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double min_mean_iou = 0.85;
  double min_instance_iou = 0.75;
  bool allow_unpaired = false;
  unsigned jobs = 1;

  /// Throws Error naming the first out-of-range field.
  void validate() const;

  DecodeConfig decode_config() const;
  EvalConfig eval_config() const;
  LossConfig loss_config() const;
};

std::string to_json(const RunConfig& cfg);
/// Fields absent from the JSON keep the values already in `base`.
RunConfig from_json(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

inline constexpr const char* kRunConfigFile = "run_config.json";
inline constexpr const char* kConfigEnvVar = "TEXTSHAPE_CONFIG";

/// Writes `<dir>/run_config.json`, creating `dir` if needed.
void write_run_config(const std::filesystem::path& dir, const RunConfig& cfg);

}  // namespace textshape::cli
