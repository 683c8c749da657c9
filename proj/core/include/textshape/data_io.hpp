#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textshape/decode.hpp"
#include "textshape/encode.hpp"

namespace textshape {

// ---------------------------------------------------------------------------
// Annotation text formats (one instance per line)
//
//   ctw1500     x1,y1,...,xn,yn            n even; upper chain, then lower reversed
//   icdar2015   x1,y1,...,x4,y4,text       text "###" marks don't-care
//   msra_td500  index difficulty x y w h angle   (angle in radians)
//   totaltext   n,x1,y1,...,xn,yn[,flag]   flag 1 or "###" marks don't-care
//
// Blank lines and lines starting with '#' are skipped, except the directive
// "# image_size W H", which sets the image size used for clipping.
// ---------------------------------------------------------------------------

enum class AnnotationFormat { Ctw1500, Icdar2015, MsraTd500, TotalText };

AnnotationFormat annotation_format_from_name(std::string_view name);
std::string_view annotation_format_name(AnnotationFormat f);

AnnotationPolygon parse_ctw1500(std::string_view line, std::size_t line_no = 0);
AnnotationPolygon parse_icdar2015(std::string_view line, std::size_t line_no = 0);
AnnotationPolygon parse_msra_td500(std::string_view line, std::size_t line_no = 0);
AnnotationPolygon parse_totaltext(std::string_view line, std::size_t line_no = 0);
AnnotationPolygon parse_annotation_line(std::string_view line, AnnotationFormat f, std::size_t line_no = 0);

/// Canonical single-line form; parse_annotation_line reads it back unchanged.
std::string format_annotation_line(const AnnotationPolygon& a, AnnotationFormat f, std::size_t index = 0);

struct ImageSize {
  int width = 0;
  int height = 0;
};

struct DatasetRecord {
  std::string image_id;
  ImageSize image_size;
  std::vector<AnnotationPolygon> annotations;
  std::vector<std::string> diagnostics;
};

/// Parses a whole annotation file. Without an image_size directive (or an
/// explicit `size`), the size is the annotations' bounding extent rounded up.
/// Vertices outside the image are clipped, with a diagnostic.
DatasetRecord parse_annotation_text(std::string_view text, AnnotationFormat f, std::string image_id,
                                    std::optional<ImageSize> size = std::nullopt);
DatasetRecord load_annotation_file(const std::filesystem::path& path, AnnotationFormat f);
std::string format_annotation_text(const DatasetRecord& rec, AnnotationFormat f);

// ---------------------------------------------------------------------------
// MSRR binary raster
//
//   offset  size  field
//   0       4     magic "MSRR" (4D 53 52 52)
//   4       4     u32 version = 1
//   8       4     u32 width
//   12      4     u32 height
//   16      4     u32 stride
//   20      4     u32 channel_count
//   24      ...   channel_count planes of width*height f32, row-major
//
// All integers and floats little-endian. Label files carry 4 channels (mask,
// dist_x, dist_y, ignore_mask), prediction files 3 (prob, dist_x, dist_y).
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kMsrrVersion = 1;
inline constexpr std::size_t kMsrrHeaderSize = 24;

struct RasterFile {
  RasterGrid grid;
  std::vector<std::vector<float>> planes;
};

std::vector<std::uint8_t> encode_msrr(const RasterFile& raster);
RasterFile decode_msrr(std::span<const std::uint8_t> bytes);

void write_raster(const std::filesystem::path& path, const RasterFile& raster);
RasterFile read_raster(const std::filesystem::path& path);

RasterFile to_raster_file(const LabelRaster& labels);
RasterFile to_raster_file(const PredictionRaster& pred);
LabelRaster label_from_raster_file(const RasterFile& file);
/// Accepts 3-channel prediction files and 4-channel label files (mask as prob).
PredictionRaster prediction_from_raster_file(const RasterFile& file);

void write_label_raster(const std::filesystem::path& path, const LabelRaster& labels);
LabelRaster read_label_raster(const std::filesystem::path& path);
void write_prediction_raster(const std::filesystem::path& path, const PredictionRaster& pred);
PredictionRaster read_prediction_raster(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Detection lines: "score,n,x1,y1,...,xn,yn", three decimals throughout.
// ---------------------------------------------------------------------------

std::string format_detections(std::span<const Detection> dets);
std::vector<Detection> parse_detections(std::string_view text);
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets);
std::vector<Detection> read_detections(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace textshape
