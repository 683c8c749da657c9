#include "textshape/data_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace textshape {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line_no, const char* what) {
  tok = trim(tok);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, std::string("expected a number for ") + what + ", got '" + std::string(tok) + "'");
  }
  return v;
}

long long parse_integer(std::string_view tok, std::size_t line_no, const char* what) {
  tok = trim(tok);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("expected an integer for ") + what + ", got '" + std::string(tok) + "'");
  }
  return v;
}

AnnotationPolygon build(std::vector<Point2> vertices, bool ignore, std::size_t line_no) {
  try {
    return split_sides(vertices, ignore);
  } catch (const MalformedAnnotationError& e) {
    throw ParseError(line_no, e.what());
  }
}

std::vector<Point2> read_pairs(std::span<const std::string_view> toks, std::size_t line_no) {
  std::vector<Point2> v;
  v.reserve(toks.size() / 2);
  for (std::size_t i = 0; i + 1 < toks.size(); i += 2) {
    v.push_back({parse_real(toks[i], line_no, "x"), parse_real(toks[i + 1], line_no, "y")});
  }
  return v;
}

std::string number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Rectangle parameters are re-derived from rotated corners, which adds a few
// ulps of drift; 12 significant digits keeps serialization a fixed point.
std::string rect_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  std::string s(buf, ptr);
  return s == "-0" ? "0" : s;
}

std::string join_vertices(std::span<const Point2> ring, char sep) {
  std::string out;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (i) out += sep;
    out += number(ring[i].x);
    out += sep;
    out += number(ring[i].y);
  }
  return out;
}

}  // namespace

AnnotationFormat annotation_format_from_name(std::string_view name) {
  if (name == "ctw1500") return AnnotationFormat::Ctw1500;
  if (name == "icdar2015") return AnnotationFormat::Icdar2015;
  if (name == "msra_td500" || name == "msra-td500" || name == "td500") return AnnotationFormat::MsraTd500;
  if (name == "totaltext" || name == "total-text") return AnnotationFormat::TotalText;
  throw ParseError(0, "unknown annotation format '" + std::string(name) + "'");
}

std::string_view annotation_format_name(AnnotationFormat f) {
  switch (f) {
    case AnnotationFormat::Ctw1500:
      return "ctw1500";
    case AnnotationFormat::Icdar2015:
      return "icdar2015";
    case AnnotationFormat::MsraTd500:
      return "msra_td500";
    case AnnotationFormat::TotalText:
      return "totaltext";
  }
  return "?";
}

AnnotationPolygon parse_ctw1500(std::string_view line, std::size_t line_no) {
  const auto toks = split(trim(line), ',');
  if (toks.size() % 2 != 0) {
    throw ParseError(line_no, "ctw1500: odd token count " + std::to_string(toks.size()));
  }
  if (toks.size() < 8 || (toks.size() / 2) % 2 != 0) {
    throw ParseError(line_no, "ctw1500: need an even number (>= 4) of vertices, got " +
                                  std::to_string(toks.size() / 2));
  }
  return build(read_pairs(toks, line_no), false, line_no);
}

AnnotationPolygon parse_icdar2015(std::string_view line, std::size_t line_no) {
  const auto toks = split(trim(line), ',');
  if (toks.size() < 9) throw ParseError(line_no, "icdar2015: expected 8 coordinates and a transcription");
  std::string text(toks[8]);
  for (std::size_t i = 9; i < toks.size(); ++i) {
    text += ',';
    text += toks[i];
  }
  const bool ignore = trim(text) == "###";
  AnnotationPolygon a = build(read_pairs(std::span(toks).first(8), line_no), ignore, line_no);
  a.transcription = std::move(text);
  return a;
}

AnnotationPolygon parse_msra_td500(std::string_view line, std::size_t line_no) {
  const auto toks = split_whitespace(trim(line));
  if (toks.size() != 7) {
    throw ParseError(line_no, "msra_td500: expected 7 fields (index difficulty x y w h angle), got " +
                                  std::to_string(toks.size()));
  }
  parse_integer(toks[0], line_no, "index");
  const long long difficulty = parse_integer(toks[1], line_no, "difficulty");
  const double x = parse_real(toks[2], line_no, "x");
  const double y = parse_real(toks[3], line_no, "y");
  const double w = parse_real(toks[4], line_no, "w");
  const double h = parse_real(toks[5], line_no, "h");
  const double angle = parse_real(toks[6], line_no, "angle");

  const Point2 c{x + w / 2.0, y + h / 2.0};
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  std::vector<Point2> v;
  for (const Point2 d : {Point2{-w / 2, -h / 2}, Point2{w / 2, -h / 2}, Point2{w / 2, h / 2}, Point2{-w / 2, h / 2}}) {
    v.push_back({c.x + d.x * cs - d.y * sn, c.y + d.x * sn + d.y * cs});
  }
  return build(std::move(v), difficulty != 0, line_no);
}

AnnotationPolygon parse_totaltext(std::string_view line, std::size_t line_no) {
  const auto toks = split(trim(line), ',');
  const long long n = parse_integer(toks[0], line_no, "vertex count");
  if (n < 4 || n % 2 != 0) throw ParseError(line_no, "totaltext: vertex count must be even and >= 4");
  if (n > 1'000'000) throw ParseError(line_no, "totaltext: vertex count too large");
  const std::size_t coords = static_cast<std::size_t>(2 * n);
  if (toks.size() != 1 + coords && toks.size() != 2 + coords) {
    throw ParseError(line_no, "totaltext: expected " + std::to_string(coords) + " coordinates, got " +
                                  std::to_string(toks.size() - 1));
  }
  bool ignore = false;
  if (toks.size() == 2 + coords) {
    const std::string_view flag = trim(toks.back());
    if (flag == "1" || flag == "###") {
      ignore = true;
    } else if (flag != "0") {
      throw ParseError(line_no, "totaltext: ignore flag must be 0, 1 or ###");
    }
  }
  return build(read_pairs(std::span(toks).subspan(1, coords), line_no), ignore, line_no);
}

AnnotationPolygon parse_annotation_line(std::string_view line, AnnotationFormat f, std::size_t line_no) {
  switch (f) {
    case AnnotationFormat::Ctw1500:
      return parse_ctw1500(line, line_no);
    case AnnotationFormat::Icdar2015:
      return parse_icdar2015(line, line_no);
    case AnnotationFormat::MsraTd500:
      return parse_msra_td500(line, line_no);
    case AnnotationFormat::TotalText:
      return parse_totaltext(line, line_no);
  }
  throw ParseError(line_no, "unknown format");
}

std::string format_annotation_line(const AnnotationPolygon& a, AnnotationFormat f, std::size_t index) {
  const std::vector<Point2> ring = a.ring();
  switch (f) {
    case AnnotationFormat::Ctw1500:
      return join_vertices(ring, ',');
    case AnnotationFormat::Icdar2015: {
      if (ring.size() != 4) throw MalformedAnnotationError("icdar2015 needs a quadrilateral");
      std::string text = a.ignore ? "###" : a.transcription;
      return join_vertices(ring, ',') + "," + text;
    }
    case AnnotationFormat::MsraTd500: {
      if (ring.size() != 4) throw MalformedAnnotationError("msra_td500 needs a rectangle");
      const double w = distance(ring[0], ring[1]);
      const double h = distance(ring[0], ring[3]);
      const double angle = std::atan2(ring[1].y - ring[0].y, ring[1].x - ring[0].x);
      const Point2 c = (ring[0] + ring[1] + ring[2] + ring[3]) * 0.25;
      return std::to_string(index) + " " + (a.ignore ? "1" : "0") + " " + rect_number(c.x - w / 2) + " " +
             rect_number(c.y - h / 2) + " " + rect_number(w) + " " + rect_number(h) + " " + rect_number(angle);
    }
    case AnnotationFormat::TotalText:
      return std::to_string(ring.size()) + "," + join_vertices(ring, ',') + (a.ignore ? ",1" : "");
  }
  return {};
}

DatasetRecord parse_annotation_text(std::string_view text, AnnotationFormat f, std::string image_id,
                                    std::optional<ImageSize> size) {
  DatasetRecord rec;
  rec.image_id = std::move(image_id);
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto toks = split_whitespace(line.substr(1));
      if (!toks.empty() && toks[0] == "image_size") {
        if (toks.size() != 3) throw ParseError(line_no, "image_size directive needs W and H");
        const long long w = parse_integer(toks[1], line_no, "image width");
        const long long h = parse_integer(toks[2], line_no, "image height");
        if (w <= 0 || h <= 0 || w > 1'000'000 || h > 1'000'000) throw ParseError(line_no, "bad image size");
        if (!size) size = ImageSize{static_cast<int>(w), static_cast<int>(h)};
      }
      continue;
    }
    rec.annotations.push_back(parse_annotation_line(line, f, line_no));
  }

  if (!size) {
    double max_x = 0.0, max_y = 0.0;
    for (const auto& a : rec.annotations) {
      for (const auto& p : a.ring()) {
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
      }
    }
    size = ImageSize{static_cast<int>(std::ceil(max_x)) + 1, static_cast<int>(std::ceil(max_y)) + 1};
  }
  rec.image_size = *size;

  std::vector<AnnotationPolygon> kept;
  for (std::size_t k = 0; k < rec.annotations.size(); ++k) {
    AnnotationPolygon& a = rec.annotations[k];
    bool clipped = false;
    for (auto* chain : {&a.upper, &a.lower}) {
      for (auto& p : *chain) {
        const Point2 q{std::clamp(p.x, 0.0, static_cast<double>(size->width)),
                       std::clamp(p.y, 0.0, static_cast<double>(size->height))};
        clipped = clipped || q != p;
        p = q;
      }
    }
    if (clipped) {
      rec.diagnostics.push_back(rec.image_id + ": annotation " + std::to_string(k) + " clipped to image bounds");
      if (!is_simple(a.ring())) {
        rec.diagnostics.push_back(rec.image_id + ": annotation " + std::to_string(k) +
                                  " degenerate after clipping, dropped");
        continue;
      }
    }
    kept.push_back(std::move(a));
  }
  rec.annotations = std::move(kept);
  return rec;
}

DatasetRecord load_annotation_file(const std::filesystem::path& path, AnnotationFormat f) {
  const std::string text = read_text_file(path);
  try {
    return parse_annotation_text(text, f, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + std::string(e.what()));
  }
}

std::string format_annotation_text(const DatasetRecord& rec, AnnotationFormat f) {
  std::string out = "# image_size " + std::to_string(rec.image_size.width) + " " +
                    std::to_string(rec.image_size.height) + "\n";
  for (std::size_t k = 0; k < rec.annotations.size(); ++k) {
    out += format_annotation_line(rec.annotations[k], f, k);
    out += '\n';
  }
  return out;
}

// --- MSRR ------------------------------------------------------------------

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_msrr(const RasterFile& raster) {
  raster.grid.validate();
  const std::size_t cells = static_cast<std::size_t>(raster.grid.width) * static_cast<std::size_t>(raster.grid.height);
  for (const auto& plane : raster.planes) {
    if (plane.size() != cells) throw FormatError("MSRR plane size does not match grid");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kMsrrHeaderSize + raster.planes.size() * cells * 4);
  for (const char c : {'M', 'S', 'R', 'R'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kMsrrVersion);
  put_u32(out, static_cast<std::uint32_t>(raster.grid.width));
  put_u32(out, static_cast<std::uint32_t>(raster.grid.height));
  put_u32(out, static_cast<std::uint32_t>(raster.grid.stride));
  put_u32(out, static_cast<std::uint32_t>(raster.planes.size()));
  for (const auto& plane : raster.planes) {
    for (const float f : plane) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

RasterFile decode_msrr(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMsrrHeaderSize) throw FormatError("MSRR: truncated header");
  if (bytes[0] != 0x4D || bytes[1] != 0x53 || bytes[2] != 0x52 || bytes[3] != 0x52) {
    throw FormatError("MSRR: bad magic");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kMsrrVersion) throw FormatError("MSRR: unknown version " + std::to_string(version));
  const std::uint32_t width = get_u32(bytes, 8);
  const std::uint32_t height = get_u32(bytes, 12);
  const std::uint32_t stride = get_u32(bytes, 16);
  const std::uint32_t channels = get_u32(bytes, 20);
  if (stride == 0) throw FormatError("MSRR: stride must be >= 1");
  if (width > (1u << 20) || height > (1u << 20) || stride > (1u << 20) || channels > 64) {
    throw FormatError("MSRR: header field out of range");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(width) * height;
  const std::uint64_t expected = kMsrrHeaderSize + cells * channels * 4;
  if (bytes.size() < expected) throw FormatError("MSRR: truncated payload");
  if (bytes.size() > expected) throw FormatError("MSRR: trailing bytes after payload");

  RasterFile out;
  out.grid = {static_cast<int>(width), static_cast<int>(height), static_cast<int>(stride)};
  out.planes.resize(channels);
  std::size_t off = kMsrrHeaderSize;
  for (auto& plane : out.planes) {
    plane.resize(static_cast<std::size_t>(cells));
    for (auto& f : plane) {
      f = std::bit_cast<float>(get_u32(bytes, off));
      off += 4;
    }
  }
  return out;
}

void write_raster(const std::filesystem::path& path, const RasterFile& raster) {
  const auto bytes = encode_msrr(raster);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("failed writing " + path.string());
}

RasterFile read_raster(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return decode_msrr(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

template <typename T>
std::vector<float> to_plane(const Grid2D<T>& g) {
  std::vector<float> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = static_cast<float>(g[i]);
  return out;
}

RealGrid real_plane(const RasterFile& f, std::size_t c) {
  RealGrid g(f.grid.width, f.grid.height);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f.planes[c][i];
  return g;
}

Mask mask_plane(const RasterFile& f, std::size_t c) {
  Mask g(f.grid.width, f.grid.height);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f.planes[c][i] >= 0.5f ? 1 : 0;
  return g;
}

}  // namespace

RasterFile to_raster_file(const LabelRaster& labels) {
  return {labels.grid, {to_plane(labels.mask), to_plane(labels.dist_x), to_plane(labels.dist_y),
                        to_plane(labels.ignore_mask)}};
}

RasterFile to_raster_file(const PredictionRaster& pred) {
  return {pred.grid, {to_plane(pred.prob), to_plane(pred.dist_x), to_plane(pred.dist_y)}};
}

LabelRaster label_from_raster_file(const RasterFile& file) {
  if (file.planes.size() != 4) {
    throw FormatError("MSRR label raster needs 4 channels, got " + std::to_string(file.planes.size()));
  }
  LabelRaster out(file.grid);
  out.mask = mask_plane(file, 0);
  out.dist_x = real_plane(file, 1);
  out.dist_y = real_plane(file, 2);
  out.ignore_mask = mask_plane(file, 3);
  return out;
}

PredictionRaster prediction_from_raster_file(const RasterFile& file) {
  if (file.planes.size() != 3 && file.planes.size() != 4) {
    throw FormatError("MSRR prediction raster needs 3 channels, got " + std::to_string(file.planes.size()));
  }
  PredictionRaster out(file.grid);
  out.prob = real_plane(file, 0);
  out.dist_x = real_plane(file, 1);
  out.dist_y = real_plane(file, 2);
  for (auto& p : out.prob.data()) {
    if (!(p >= 0.0 && p <= 1.0)) throw FormatError("MSRR prediction: probability outside [0, 1]");
  }
  return out;
}

void write_label_raster(const std::filesystem::path& path, const LabelRaster& labels) {
  write_raster(path, to_raster_file(labels));
}

LabelRaster read_label_raster(const std::filesystem::path& path) { return label_from_raster_file(read_raster(path)); }

void write_prediction_raster(const std::filesystem::path& path, const PredictionRaster& pred) {
  write_raster(path, to_raster_file(pred));
}

PredictionRaster read_prediction_raster(const std::filesystem::path& path) {
  const RasterFile f = read_raster(path);
  try {
    return prediction_from_raster_file(f);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// --- Detections ------------------------------------------------------------

std::string format_detections(std::span<const Detection> dets) {
  std::string out;
  char buf[64];
  for (const auto& d : dets) {
    std::snprintf(buf, sizeof buf, "%.3f,%zu", d.score, d.polygon.size());
    out += buf;
    for (const auto& p : d.polygon.vertices()) {
      std::snprintf(buf, sizeof buf, ",%.3f,%.3f", p.x, p.y);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<Detection> parse_detections(std::string_view text) {
  std::vector<Detection> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;

    const auto toks = split(line, ',');
    if (toks.size() < 2) throw ParseError(line_no, "detection: expected score,n,coordinates");
    Detection d;
    d.score = parse_real(toks[0], line_no, "score");
    if (d.score < 0.0 || d.score > 1.0) throw ParseError(line_no, "detection: score outside [0, 1]");
    const long long n = parse_integer(toks[1], line_no, "vertex count");
    if (n < 3) throw ParseError(line_no, "detection: need at least 3 vertices");
    if (toks.size() != 2 + 2 * static_cast<std::size_t>(n)) {
      throw ParseError(line_no, "detection: expected " + std::to_string(2 * n) + " coordinates, got " +
                                    std::to_string(toks.size() - 2));
    }
    try {
      d.polygon = Polygon(read_pairs(std::span(toks).subspan(2), line_no));
    } catch (const DegenerateInputError& e) {
      throw ParseError(line_no, std::string("detection: ") + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> dets) {
  write_text_file(path, format_detections(dets));
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  try {
    return parse_detections(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + std::string(e.what()));
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace textshape
