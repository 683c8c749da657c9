#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "textshape/decode.hpp"
#include "textshape/encode.hpp"
#include "textshape/evalkit.hpp"
#include "textshape/netplan.hpp"

namespace textshape::cli {

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void run_parallel(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

// Per-file noise seed: the run seed mixed with a hash of the image id, so a
// file's noise does not depend on which other files are processed.
std::uint64_t file_seed(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

struct FileOutcome {
  std::string error;
  std::vector<std::string> warnings;
};

bool report_outcomes(const std::vector<fs::path>& files, const std::vector<FileOutcome>& outcomes, Streams io) {
  bool ok = true;
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (const auto& w : outcomes[i].warnings) io.err << "warning: " << w << "\n";
    if (!outcomes[i].error.empty()) {
      io.err << "error: " << outcomes[i].error << "\n";
      ok = false;
    }
  }
  return ok;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void prepare_parent(const fs::path& file, const RunConfig& cfg) {
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  write_run_config(dir, cfg);
}

}  // namespace

int cmd_encode(const fs::path& gt_dir, AnnotationFormat format, const fs::path& out_dir, const RunConfig& cfg,
               Streams io) {
  std::vector<fs::path> files;
  try {
    cfg.validate();
    files = list_files(gt_dir, ".txt");
    write_run_config(out_dir, cfg);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::vector<FileOutcome> outcomes(files.size());
  std::vector<EncodeDiagnostics> diags(files.size());
  run_parallel(files.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const DatasetRecord rec = load_annotation_file(files[i], format);
      outcomes[i].warnings = rec.diagnostics;
      const RasterGrid grid = RasterGrid::covering(rec.image_size.width, rec.image_size.height, cfg.stride);
      const LabelRaster labels = encode(rec.annotations, grid, &diags[i]);
      write_label_raster(out_dir / (files[i].stem().string() + ".msrr"), labels);
    } catch (const std::exception& e) {
      outcomes[i].error = files[i].string() + ": " + e.what();
    }
  });

  const bool ok = report_outcomes(files, outcomes, io);
  EncodeDiagnostics total;
  std::size_t written = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!outcomes[i].error.empty()) continue;
    ++written;
    total.instances += diags[i].instances;
    total.ignored += diags[i].ignored;
    total.conflict_cells += diags[i].conflict_cells;
    total.empty_regions += diags[i].empty_regions;
  }
  io.out << "encoded " << written << " of " << files.size() << " files: instances=" << total.instances
         << " ignored=" << total.ignored << " conflict_cells=" << total.conflict_cells
         << " empty_regions=" << total.empty_regions << "\n";
  return ok ? kExitOk : kExitInputError;
}

int cmd_decode(const fs::path& pred_dir, const fs::path& out_dir, const RunConfig& cfg, Streams io) {
  std::vector<fs::path> files;
  try {
    cfg.validate();
    files = list_files(pred_dir, ".msrr");
    write_run_config(out_dir, cfg);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const DecodeConfig dcfg = cfg.decode_config();
  std::vector<FileOutcome> outcomes(files.size());
  std::vector<DecodeDiagnostics> diags(files.size());
  std::vector<std::size_t> counts(files.size(), 0);
  run_parallel(files.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const std::string id = files[i].stem().string();
      PredictionRaster pred = read_prediction_raster(files[i]);
      if (cfg.noise_sigma > 0.0) add_distance_noise(pred, cfg.noise_sigma, file_seed(cfg.seed, id));
      const auto dets = decode(pred, dcfg, &diags[i]);
      counts[i] = dets.size();
      write_detections(out_dir / (id + ".txt"), dets);
    } catch (const std::exception& e) {
      outcomes[i].error = files[i].string() + ": " + e.what();
    }
  });

  const bool ok = report_outcomes(files, outcomes, io);
  std::size_t written = 0, dets = 0, rejected = 0, hulls = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!outcomes[i].error.empty()) continue;
    ++written;
    dets += counts[i];
    rejected += diags[i].rejected;
    hulls += diags[i].hull_fallbacks;
  }
  io.out << "decoded " << written << " of " << files.size() << " files: detections=" << dets
         << " rejected=" << rejected << " hull_fallbacks=" << hulls << "\n";
  return ok ? kExitOk : kExitInputError;
}

int cmd_roundtrip(const fs::path& gt_dir, AnnotationFormat format, const fs::path& report_path, const RunConfig& cfg,
                  Streams io) {
  std::vector<fs::path> files;
  try {
    cfg.validate();
    files = list_files(gt_dir, ".txt");
    prepare_parent(report_path, cfg);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  struct ImageResult {
    std::vector<std::pair<std::size_t, double>> ious;  // (gt index, best IoU)
    std::size_t detections = 0;
  };
  const DecodeConfig dcfg = cfg.decode_config();
  std::vector<FileOutcome> outcomes(files.size());
  std::vector<ImageResult> results(files.size());
  run_parallel(files.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const std::string id = files[i].stem().string();
      const DatasetRecord rec = load_annotation_file(files[i], format);
      outcomes[i].warnings = rec.diagnostics;
      const RasterGrid grid = RasterGrid::covering(rec.image_size.width, rec.image_size.height, cfg.stride);
      PredictionRaster pred = prediction_from_labels(encode(rec.annotations, grid));
      if (cfg.noise_sigma > 0.0) add_distance_noise(pred, cfg.noise_sigma, file_seed(cfg.seed, id));
      const auto dets = decode(pred, dcfg);
      results[i].detections = dets.size();
      for (std::size_t g = 0; g < rec.annotations.size(); ++g) {
        if (rec.annotations[g].ignore) continue;
        const Polygon gt = rec.annotations[g].polygon();
        double best = 0.0;
        for (const auto& d : dets) best = std::max(best, polygon_iou(d.polygon, gt));
        results[i].ious.emplace_back(g, best);
      }
    } catch (const std::exception& e) {
      outcomes[i].error = files[i].string() + ": " + e.what();
    }
  });

  if (!report_outcomes(files, outcomes, io)) return kExitInputError;

  std::string table = "image_id,gt_index,iou\n";
  std::size_t instances = 0, detections = 0, preserved = 0;
  double sum = 0.0, min_iou = 1.0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string id = files[i].stem().string();
    for (const auto& [g, iou] : results[i].ious) {
      table += id + "," + std::to_string(g) + "," + fixed(iou) + "\n";
      sum += iou;
      min_iou = std::min(min_iou, iou);
      ++instances;
    }
    detections += results[i].detections;
    if (results[i].detections == results[i].ious.size()) ++preserved;
  }
  const double mean = instances ? sum / static_cast<double>(instances) : 1.0;
  if (!instances) min_iou = 1.0;
  const bool pass = mean >= cfg.min_mean_iou && min_iou >= cfg.min_instance_iou;

  std::ostringstream summary;
  summary << "images=" << files.size() << "\n"
          << "instances=" << instances << "\n"
          << "detections=" << detections << "\n"
          << "count_preserved=" << preserved << "/" << files.size() << "\n"
          << "mean_iou=" << fixed(mean) << "\n"
          << "min_iou=" << fixed(min_iou) << "\n"
          << "min_mean_iou=" << fixed(cfg.min_mean_iou) << "\n"
          << "min_instance_iou=" << fixed(cfg.min_instance_iou) << "\n"
          << "status=" << (pass ? "pass" : "fail") << "\n";
  try {
    write_text_file(report_path, table + "\n" + summary.str());
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  io.out << summary.str();
  return pass ? kExitOk : kExitThresholdFailure;
}

int cmd_eval(const fs::path& det_dir, const fs::path& gt_dir, AnnotationFormat format, const fs::path& report_path,
             const std::optional<fs::path>& per_image_path, const RunConfig& cfg, Streams io) {
  try {
    cfg.validate();
    const EvalConfig ecfg = cfg.eval_config();
    const DatasetReport rep = evaluate_dataset(det_dir, gt_dir, format, ecfg);
    prepare_parent(report_path, cfg);
    const std::string text = format_report(rep, ecfg);
    write_text_file(report_path, text);
    if (per_image_path) write_text_file(*per_image_path, format_per_image(rep));
    io.out << text;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

namespace {

std::string svg_path(const std::vector<Point2>& ring) {
  std::string d;
  char buf[64];
  for (std::size_t i = 0; i < ring.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f %.3f", i == 0 ? "M" : " L", ring[i].x, ring[i].y);
    d += buf;
  }
  return d + " Z";
}

}  // namespace

int cmd_render(const std::optional<fs::path>& gt_file, AnnotationFormat format,
               const std::optional<fs::path>& det_file, bool quads, const fs::path& out_svg, const RunConfig& cfg,
               Streams io) {
  std::vector<AnnotationPolygon> gts;
  std::vector<Detection> dets;
  std::optional<ImageSize> size;
  try {
    if (gt_file) {
      DatasetRecord rec = load_annotation_file(*gt_file, format);
      gts = std::move(rec.annotations);
      if (!gts.empty()) size = rec.image_size;
    }
    if (det_file) dets = read_detections(*det_file);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  double w = size ? size->width : 0.0;
  double h = size ? size->height : 0.0;
  for (const auto& d : dets) {
    for (const auto& p : d.polygon.vertices()) {
      w = std::max(w, std::ceil(p.x) + 1.0);
      h = std::max(h, std::ceil(p.y) + 1.0);
    }
  }
  w = std::max(w, 1.0);
  h = std::max(h, 1.0);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
      << w << " " << h << "\">\n";
  svg << "  <g id=\"gt\" fill=\"none\" stroke=\"blue\" stroke-width=\"1\">\n";
  for (const auto& g : gts) {
    svg << "    <path d=\"" << svg_path(g.ring()) << "\"" << (g.ignore ? " stroke-dasharray=\"4 2\"" : "") << "/>\n";
  }
  svg << "  </g>\n";
  svg << "  <g id=\"det\" fill=\"none\" stroke=\"green\" stroke-width=\"1\">\n";
  for (const auto& d : dets) svg << "    <path d=\"" << svg_path(d.polygon.vertices()) << "\"/>\n";
  svg << "  </g>\n";
  if (quads) {
    svg << "  <g id=\"quad\" fill=\"none\" stroke=\"red\" stroke-width=\"1\">\n";
    for (const auto& d : dets) {
      const Polygon q = d.quad ? *d.quad : min_area_rect(d.polygon);
      svg << "    <path d=\"" << svg_path(q.vertices()) << "\"/>\n";
    }
    svg << "  </g>\n";
  }
  svg << "</svg>\n";

  try {
    prepare_parent(out_svg, cfg);
    write_text_file(out_svg, svg.str());
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  io.out << "rendered " << gts.size() << " ground truth and " << dets.size() << " detection polygons to "
         << out_svg.string() << "\n";
  return kExitOk;
}

int cmd_netplan(int height, int width, int channels, Streams io) {
  try {
    const ShapePlan plan = shape_plan(height, width, channels);
    io.out << format_plan(plan);
    return plan.aligned() ? kExitOk : kExitThresholdFailure;
  } catch (const PlanShapeError& e) {
    io.err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace textshape::cli
