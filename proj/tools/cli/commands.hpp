#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "run_config.hpp"
#include "textshape/data_io.hpp"

namespace textshape::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitThresholdFailure = 2,
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

namespace fs = std::filesystem;

/// One `<stem>.msrr` label raster per annotation file in gt_dir.
int cmd_encode(const fs::path& gt_dir, AnnotationFormat format, const fs::path& out_dir, const RunConfig& cfg,
               Streams io);

/// One `<stem>.txt` detection file per `.msrr` prediction in pred_dir.
int cmd_decode(const fs::path& pred_dir, const fs::path& out_dir, const RunConfig& cfg, Streams io);

/// encode -> perfect prediction (+ optional noise) -> decode -> IoU against
/// the annotations. Writes a per-instance table plus summary to report_path;
/// exits 2 when the mean or minimum IoU misses cfg's thresholds.
int cmd_roundtrip(const fs::path& gt_dir, AnnotationFormat format, const fs::path& report_path, const RunConfig& cfg,
                  Streams io);

int cmd_eval(const fs::path& det_dir, const fs::path& gt_dir, AnnotationFormat format, const fs::path& report_path,
             const std::optional<fs::path>& per_image_path, const RunConfig& cfg, Streams io);

/// SVG with layers gt (blue), det (green) and, when `quads`, the detections'
/// minimum-area rectangles (red). Either input may be absent.
int cmd_render(const std::optional<fs::path>& gt_file, AnnotationFormat format,
               const std::optional<fs::path>& det_file, bool quads, const fs::path& out_svg, const RunConfig& cfg,
               Streams io);

int cmd_netplan(int height, int width, int channels, Streams io);

/// Sorted regular files in `dir` with the given extension.
std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension);

}  // namespace textshape::cli
