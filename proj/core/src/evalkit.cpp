#include "textshape/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <numeric>
#include <thread>

namespace textshape {

EvalMode eval_mode_from_name(std::string_view name) {
  if (name == "polygon") return EvalMode::Polygon;
  if (name == "quad") return EvalMode::Quad;
  throw Error("unknown evaluation mode '" + std::string(name) + "' (expected polygon or quad)");
}

std::string_view eval_mode_name(EvalMode m) { return m == EvalMode::Quad ? "quad" : "polygon"; }

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw Error("iou_threshold must lie in (0, 1]");
  if (iou_resolution < 64) throw Error("iou_resolution must be at least 64");
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  ignored_dets += o.ignored_dets;
  return *this;
}

Scores scores_from_counts(const EvalCounts& c) {
  const std::size_t det_den = c.tp + c.fp;
  const std::size_t gt_den = c.tp + c.fn;
  if (det_den == 0 && gt_den == 0) return {1.0, 1.0, 1.0};
  const double p = det_den ? static_cast<double>(c.tp) / static_cast<double>(det_den) : 0.0;
  const double r = gt_den ? static_cast<double>(c.tp) / static_cast<double>(gt_den) : 0.0;
  const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  return {p, r, f};
}

EvalReport match(std::span<const Detection> dets, std::span<const AnnotationPolygon> gts, const EvalConfig& cfg) {
  cfg.validate();

  std::vector<Polygon> gt_shapes;
  gt_shapes.reserve(gts.size());
  for (const auto& g : gts) {
    Polygon p = g.polygon();
    gt_shapes.push_back(cfg.mode == EvalMode::Quad ? min_area_rect(p) : std::move(p));
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  EvalReport out;
  std::vector<bool> taken(gts.size(), false);
  for (const std::size_t d : order) {
    const Polygon shape = cfg.mode == EvalMode::Quad
                              ? (dets[d].quad ? *dets[d].quad : min_area_rect(dets[d].polygon))
                              : dets[d].polygon;
    double best_care = -1.0, best_ignore = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gts[g].ignore && taken[g]) continue;
      const double iou = polygon_iou(shape, gt_shapes[g], cfg.iou_resolution);
      if (gts[g].ignore) {
        best_ignore = std::max(best_ignore, iou);
      } else if (iou > best_care) {
        best_care = iou;
        best_gt = g;
      }
    }
    if (best_ignore >= cfg.iou_threshold && best_ignore > best_care) {
      ++out.counts.ignored_dets;
    } else if (best_care >= cfg.iou_threshold) {
      taken[best_gt] = true;
      out.matches.push_back({d, best_gt, best_care});
      ++out.counts.tp;
    } else {
      ++out.counts.fp;
    }
  }

  const auto care = static_cast<std::size_t>(std::count_if(gts.begin(), gts.end(), [](const auto& g) { return !g.ignore; }));
  out.counts.fn = care - out.counts.tp;
  const Scores s = scores_from_counts(out.counts);
  out.precision = s.precision;
  out.recall = s.recall;
  out.fscore = s.fscore;
  return out;
}

DatasetReport evaluate_dataset(std::span<const ImageEval> images, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return images[a].image_id < images[b].image_id; });

  std::vector<EvalReport> results(images.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) {
      const ImageEval& im = images[order[i]];
      results[i] = match(im.dets, im.gts, cfg);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(images.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  DatasetReport rep;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rep.total.counts += results[i].counts;
    rep.per_image.emplace_back(images[order[i]].image_id, std::move(results[i]));
  }
  const Scores s = scores_from_counts(rep.total.counts);
  rep.total.precision = s.precision;
  rep.total.recall = s.recall;
  rep.total.fscore = s.fscore;
  return rep;
}

namespace {

std::map<std::string, std::filesystem::path> files_by_stem(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
    out.emplace(e.path().stem().string(), e.path());
  }
  return out;
}

}  // namespace

DatasetReport evaluate_dataset(const std::filesystem::path& det_dir, const std::filesystem::path& gt_dir,
                               AnnotationFormat format, const EvalConfig& cfg) {
  const auto det_files = files_by_stem(det_dir);
  const auto gt_files = files_by_stem(gt_dir);

  std::vector<std::string> diagnostics;
  for (const auto& [id, path] : det_files) {
    if (!gt_files.count(id)) diagnostics.push_back("no ground truth for detections " + id);
  }
  for (const auto& [id, path] : gt_files) {
    if (!det_files.count(id)) diagnostics.push_back("no detections for ground truth " + id);
  }
  if (!diagnostics.empty() && !cfg.allow_unpaired) {
    std::string msg = "unpaired image ids:";
    for (const auto& d : diagnostics) msg += "\n  " + d;
    throw Error(msg);
  }

  std::vector<ImageEval> images;
  for (const auto& [id, gt_path] : gt_files) {
    const auto it = det_files.find(id);
    if (it == det_files.end()) continue;
    DatasetRecord rec = load_annotation_file(gt_path, format);
    images.push_back({id, read_detections(it->second), std::move(rec.annotations)});
    for (auto& d : rec.diagnostics) diagnostics.push_back(std::move(d));
  }
  DatasetReport rep = evaluate_dataset(images, cfg);
  rep.diagnostics = std::move(diagnostics);
  return rep;
}

std::string format_report(const DatasetReport& report, const EvalConfig& cfg) {
  const EvalCounts& c = report.total.counts;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "iou_threshold=%g\nmode=%s\nimages=%zu\ntp=%zu\nfp=%zu\nfn=%zu\nignored_dets=%zu\n"
                "precision=%.6f\nrecall=%.6f\nfscore=%.6f\n",
                cfg.iou_threshold, std::string(eval_mode_name(cfg.mode)).c_str(), report.per_image.size(), c.tp,
                c.fp, c.fn, c.ignored_dets, report.total.precision, report.total.recall, report.total.fscore);
  std::string out = buf;
  for (const auto& d : report.diagnostics) out += "diagnostic=" + d + "\n";
  return out;
}

std::string format_per_image(const DatasetReport& report) {
  std::string out = "image_id,tp,fp,fn,ignored_dets,precision,recall,fscore\n";
  char buf[256];
  for (const auto& [id, r] : report.per_image) {
    std::snprintf(buf, sizeof buf, ",%zu,%zu,%zu,%zu,%.6f,%.6f,%.6f\n", r.counts.tp, r.counts.fp, r.counts.fn,
                  r.counts.ignored_dets, r.precision, r.recall, r.fscore);
    out += id + buf;
  }
  return out;
}

}  // namespace textshape
