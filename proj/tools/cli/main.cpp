#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace textshape;
using namespace textshape::cli;

// Flags that override RunConfig fields. Only flags actually given on the
// command line are applied on top of the config file.
struct Overrides {
  int stride = 1;
  double alpha = 0, prob_threshold = 0, iou_threshold = 0;
  std::string mode;
  int min_points = 0, min_cells = 0, smooth_radius = 0;
  double smooth_gate = 0, lambda = 0, dice_epsilon = 0, smooth_l1_delta = 0;
  std::uint64_t seed = 0;
  double noise_sigma = 0, min_mean_iou = 0, min_instance_iou = 0;
  bool allow_unpaired = false;
  unsigned jobs = 1;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

  template <typename T>
  void add(CLI::App& app, const std::string& flag, T& slot, const std::string& help,
           std::function<void(RunConfig&)> apply) {
    setters.emplace_back(app.add_option(flag, slot, help), std::move(apply));
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(cfg);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textshape: encode, decode and evaluate arbitrary-shape text polygons"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (default: $TEXTSHAPE_CONFIG)");

  Overrides o;
  o.add(app, "--stride", o.stride, "Raster stride in pixels", [&](RunConfig& c) { c.stride = o.stride; });
  o.add(app, "--alpha", o.alpha, "Alpha-shape radius (normalized units)", [&](RunConfig& c) { c.alpha = o.alpha; });
  o.add(app, "--prob-threshold", o.prob_threshold, "Text probability threshold",
        [&](RunConfig& c) { c.prob_threshold = o.prob_threshold; });
  o.add(app, "--iou-threshold", o.iou_threshold, "IoU threshold for matching",
        [&](RunConfig& c) { c.iou_threshold = o.iou_threshold; });
  o.add(app, "--mode", o.mode, "Evaluation mode: polygon or quad",
        [&](RunConfig& c) { c.mode = eval_mode_from_name(o.mode); });
  o.add(app, "--min-points", o.min_points, "Minimum boundary points per instance",
        [&](RunConfig& c) { c.min_points = o.min_points; });
  o.add(app, "--min-cells", o.min_cells, "Minimum component size in cells",
        [&](RunConfig& c) { c.min_cells = o.min_cells; });
  o.add(app, "--smooth-radius", o.smooth_radius, "Boundary point smoothing radius in cells (0 = off)",
        [&](RunConfig& c) { c.smooth_radius = o.smooth_radius; });
  o.add(app, "--smooth-gate", o.smooth_gate, "Boundary point smoothing gate in pixels",
        [&](RunConfig& c) { c.smooth_gate = o.smooth_gate; });
  o.add(app, "--lambda", o.lambda, "Regression loss weight", [&](RunConfig& c) { c.lambda = o.lambda; });
  o.add(app, "--dice-epsilon", o.dice_epsilon, "Dice smoothing term",
        [&](RunConfig& c) { c.dice_epsilon = o.dice_epsilon; });
  o.add(app, "--smooth-l1-delta", o.smooth_l1_delta, "Smooth-L1 transition point",
        [&](RunConfig& c) { c.smooth_l1_delta = o.smooth_l1_delta; });
  o.add(app, "--seed", o.seed, "Noise seed", [&](RunConfig& c) { c.seed = o.seed; });
  o.add(app, "--noise-sigma", o.noise_sigma, "Gaussian noise on distance maps, pixels",
        [&](RunConfig& c) { c.noise_sigma = o.noise_sigma; });
  o.add(app, "--min-mean-iou", o.min_mean_iou, "Roundtrip pass threshold on mean IoU",
        [&](RunConfig& c) { c.min_mean_iou = o.min_mean_iou; });
  o.add(app, "--min-instance-iou", o.min_instance_iou, "Roundtrip pass threshold on every instance",
        [&](RunConfig& c) { c.min_instance_iou = o.min_instance_iou; });
  o.add(app, "--jobs,-j", o.jobs, "Worker threads", [&](RunConfig& c) { c.jobs = o.jobs; });
  auto* unpaired = app.add_flag("--allow-unpaired", o.allow_unpaired, "Skip images missing on one side");
  o.setters.emplace_back(unpaired, [&](RunConfig& c) { c.allow_unpaired = o.allow_unpaired; });

  std::string format_name = "ctw1500";
  std::string gt_dir, out_dir, pred_dir, det_dir, report, per_image, out_svg, gt_file, det_file;
  bool quads = false;
  int height = 0, width = 0, channels = 2;

  auto* encode = app.add_subcommand("encode", "Annotation files -> MSRR label rasters");
  encode->add_option("gt_dir", gt_dir, "Directory of annotation .txt files")->required();
  encode->add_option("out_dir", out_dir, "Output directory")->required();
  encode->add_option("--format,-f", format_name, "ctw1500, icdar2015, msra_td500 or totaltext");

  auto* decode = app.add_subcommand("decode", "MSRR prediction rasters -> detection files");
  decode->add_option("pred_dir", pred_dir, "Directory of .msrr files")->required();
  decode->add_option("out_dir", out_dir, "Output directory")->required();

  auto* roundtrip = app.add_subcommand("roundtrip", "Encode, decode and compare against the annotations");
  roundtrip->add_option("gt_dir", gt_dir, "Directory of annotation .txt files")->required();
  roundtrip->add_option("report", report, "Report file")->required();
  roundtrip->add_option("--format,-f", format_name, "Annotation format");

  auto* eval = app.add_subcommand("eval", "Precision, recall and F-score of detections");
  eval->add_option("det_dir", det_dir, "Directory of detection .txt files")->required();
  eval->add_option("gt_dir", gt_dir, "Directory of annotation .txt files")->required();
  eval->add_option("--format,-f", format_name, "Annotation format");
  eval->add_option("--report,-o", report, "Report file")->default_val("eval_report.txt");
  eval->add_option("--per-image", per_image, "Optional per-image breakdown (CSV)");

  auto* render = app.add_subcommand("render", "SVG overlay of ground truth and detections");
  render->add_option("out_svg", out_svg, "Output SVG file")->required();
  render->add_option("--gt", gt_file, "Annotation file");
  render->add_option("--det", det_file, "Detection file");
  render->add_option("--format,-f", format_name, "Annotation format");
  render->add_flag("--quads", quads, "Add a layer with each detection's minimum-area rectangle");

  auto* netplan = app.add_subcommand("netplan", "Feature-map shape plan of the fusion network");
  netplan->add_option("height", height, "Input height")->required();
  netplan->add_option("width", width, "Input width")->required();
  netplan->add_option("channels", channels, "Input-scale channels")->default_val(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  const Streams io{std::cout, std::cerr};
  if (netplan->parsed()) return cmd_netplan(height, width, channels, io);

  RunConfig cfg;
  AnnotationFormat format{};
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar)) config_path = env;
    }
    if (!config_path.empty()) cfg = load_run_config(config_path);
    o.apply(cfg);
    cfg.validate();
    format = annotation_format_from_name(format_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (encode->parsed()) return cmd_encode(gt_dir, format, out_dir, cfg, io);
  if (decode->parsed()) return cmd_decode(pred_dir, out_dir, cfg, io);
  if (roundtrip->parsed()) return cmd_roundtrip(gt_dir, format, report, cfg, io);
  if (eval->parsed()) {
    return cmd_eval(det_dir, gt_dir, format, report,
                    per_image.empty() ? std::nullopt : std::optional<fs::path>(per_image), cfg, io);
  }
  if (render->parsed()) {
    return cmd_render(gt_file.empty() ? std::nullopt : std::optional<fs::path>(gt_file), format,
                      det_file.empty() ? std::nullopt : std::optional<fs::path>(det_file), quads, out_svg, cfg, io);
  }
  return kExitInputError;
}
