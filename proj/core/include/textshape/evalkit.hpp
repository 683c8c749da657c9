#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textshape/data_io.hpp"
#include "textshape/decode.hpp"
#include "textshape/encode.hpp"

namespace textshape {

enum class EvalMode { Polygon, Quad };

EvalMode eval_mode_from_name(std::string_view name);
std::string_view eval_mode_name(EvalMode m);

struct EvalConfig {
  double iou_threshold = 0.5;
  EvalMode mode = EvalMode::Polygon;
  int iou_resolution = 512;
  /// Skip images present on only one side instead of failing.
  bool allow_unpaired = false;
  unsigned jobs = 1;

  void validate() const;
};

struct Match {
  std::size_t det_index;
  std::size_t gt_index;
  double iou;
};

/// fn counts only ground truths that are not don't-care.
struct EvalCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ignored_dets = 0;

  EvalCounts& operator+=(const EvalCounts& o);
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  std::vector<Match> matches;
  EvalCounts counts;
};

struct Scores {
  double precision;
  double recall;
  double fscore;
};

/// P = tp/(tp+fp), R = tp/(tp+fn). With nothing to detect and nothing
/// detected, all three are 1; any other zero denominator gives 0.
Scores scores_from_counts(const EvalCounts& c);

/// Greedy matching in score order (ties by index). A detection claims the
/// unmatched ground truth of highest IoU when that IoU reaches the threshold.
/// A detection whose best overlap is a don't-care region at or above the
/// threshold is counted in ignored_dets instead of tp or fp.
EvalReport match(std::span<const Detection> dets, std::span<const AnnotationPolygon> gts,
                 const EvalConfig& cfg = {});

struct ImageEval {
  std::string image_id;
  std::vector<Detection> dets;
  std::vector<AnnotationPolygon> gts;
};

struct DatasetReport {
  EvalReport total;  // micro-averaged; matches left empty
  std::vector<std::pair<std::string, EvalReport>> per_image;
  std::vector<std::string> diagnostics;
};

/// Micro-averaged over the images, which are reported sorted by image_id.
DatasetReport evaluate_dataset(std::span<const ImageEval> images, const EvalConfig& cfg = {});

/// Pairs `<det_dir>/<id>.txt` with the annotation file of the same stem in
/// gt_dir. Unpaired ids throw Error unless cfg.allow_unpaired, in which case
/// they are listed in the diagnostics and skipped.
DatasetReport evaluate_dataset(const std::filesystem::path& det_dir, const std::filesystem::path& gt_dir,
                               AnnotationFormat format, const EvalConfig& cfg = {});

/// key=value lines: threshold, mode, images, tp, fp, fn, ignored_dets,
/// precision, recall, fscore, then one "diagnostic=" line per diagnostic.
std::string format_report(const DatasetReport& report, const EvalConfig& cfg);
/// One line per image: image_id,tp,fp,fn,ignored_dets,precision,recall,fscore.
std::string format_per_image(const DatasetReport& report);

}  // namespace textshape
