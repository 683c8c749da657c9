#include "run_config.hpp"

#include <json.hpp>

#include "textshape/data_io.hpp"

namespace textshape::cli {

using nlohmann::json;

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("config: ") + what);
  };
  require(stride >= 1, "stride must be >= 1");
  require(alpha > 0.0, "alpha must be > 0");
  require(prob_threshold > 0.0 && prob_threshold <= 1.0, "prob_threshold must lie in (0, 1]");
  require(iou_threshold > 0.0 && iou_threshold <= 1.0, "iou_threshold must lie in (0, 1]");
  require(min_points >= 3, "min_points must be >= 3");
  require(!min_cells || *min_cells >= 1, "min_cells must be >= 1");
  require(smooth_radius >= 0, "smooth_radius must be >= 0");
  require(smooth_gate > 0.0, "smooth_gate must be > 0");
  require(lambda > 0.0, "lambda must be > 0");
  require(dice_epsilon > 0.0, "dice_epsilon must be > 0");
  require(smooth_l1_delta > 0.0, "smooth_l1_delta must be > 0");
  require(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(min_mean_iou >= 0.0 && min_mean_iou <= 1.0, "min_mean_iou must lie in [0, 1]");
  require(min_instance_iou >= 0.0 && min_instance_iou <= 1.0, "min_instance_iou must lie in [0, 1]");
  require(jobs >= 1, "jobs must be >= 1");
}

DecodeConfig RunConfig::decode_config() const {
  DecodeConfig d;
  d.prob_threshold = prob_threshold;
  d.alpha = alpha;
  d.min_points = min_points;
  d.min_cells = min_cells;
  d.smooth_radius = smooth_radius;
  d.smooth_gate = smooth_gate;
  d.derive_quads = mode == EvalMode::Quad;
  return d;
}

EvalConfig RunConfig::eval_config() const {
  EvalConfig e;
  e.iou_threshold = iou_threshold;
  e.mode = mode;
  e.allow_unpaired = allow_unpaired;
  e.jobs = jobs;
  return e;
}

LossConfig RunConfig::loss_config() const { return {lambda, dice_epsilon, smooth_l1_delta}; }

std::string to_json(const RunConfig& c) {
  json j;
  j["stride"] = c.stride;
  j["alpha"] = c.alpha;
  j["prob_threshold"] = c.prob_threshold;
  j["iou_threshold"] = c.iou_threshold;
  j["mode"] = std::string(eval_mode_name(c.mode));
  j["min_points"] = c.min_points;
  j["min_cells"] = c.min_cells ? json(*c.min_cells) : json(nullptr);
  j["smooth_radius"] = c.smooth_radius;
  j["smooth_gate"] = c.smooth_gate;
  j["lambda"] = c.lambda;
  j["dice_epsilon"] = c.dice_epsilon;
  j["smooth_l1_delta"] = c.smooth_l1_delta;
  j["seed"] = c.seed;
  j["noise_sigma"] = c.noise_sigma;
  j["min_mean_iou"] = c.min_mean_iou;
  j["min_instance_iou"] = c.min_instance_iou;
  j["allow_unpaired"] = c.allow_unpaired;
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

RunConfig from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config: top level must be an object");

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "stride") c.stride = value.get<int>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "prob_threshold") c.prob_threshold = value.get<double>();
      else if (key == "iou_threshold") c.iou_threshold = value.get<double>();
      else if (key == "mode") c.mode = eval_mode_from_name(value.get<std::string>());
      else if (key == "min_points") c.min_points = value.get<int>();
      else if (key == "min_cells") c.min_cells = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      else if (key == "smooth_radius") c.smooth_radius = value.get<int>();
      else if (key == "smooth_gate") c.smooth_gate = value.get<double>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "dice_epsilon") c.dice_epsilon = value.get<double>();
      else if (key == "smooth_l1_delta") c.smooth_l1_delta = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "noise_sigma") c.noise_sigma = value.get<double>();
      else if (key == "min_mean_iou") c.min_mean_iou = value.get<double>();
      else if (key == "min_instance_iou") c.min_instance_iou = value.get<double>();
      else if (key == "allow_unpaired") c.allow_unpaired = value.get<bool>();
      else if (key == "jobs") c.jobs = value.get<unsigned>();
      else throw Error("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: wrong value type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  try {
    return from_json(read_text_file(path), base);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_run_config(const std::filesystem::path& dir, const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / kRunConfigFile, to_json(cfg));
}

}  // namespace textshape::cli
