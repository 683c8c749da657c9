#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "textshape/data_io.hpp"

using namespace textshape;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = TEXTSHAPE_FIXTURES;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("textshape_data_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_same(const AnnotationPolygon& a, const AnnotationPolygon& b, double tol = 1e-9) {
  const auto ra = a.ring(), rb = b.ring();
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_NEAR(ra[i].x, rb[i].x, tol);
    EXPECT_NEAR(ra[i].y, rb[i].y, tol);
  }
  EXPECT_EQ(a.ignore, b.ignore);
}

std::size_t parse_error_line(std::string_view text, AnnotationFormat f) {
  try {
    parse_annotation_text(text, f, "x");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(FormatNames, RoundTrip) {
  for (const auto f : {AnnotationFormat::Ctw1500, AnnotationFormat::Icdar2015, AnnotationFormat::MsraTd500,
                       AnnotationFormat::TotalText}) {
    EXPECT_EQ(annotation_format_from_name(annotation_format_name(f)), f);
  }
  EXPECT_EQ(annotation_format_from_name("total-text"), AnnotationFormat::TotalText);
  EXPECT_THROW(annotation_format_from_name("coco"), Error);
}

TEST(Ctw1500, SixPairLine) {
  const AnnotationPolygon a = parse_ctw1500("0,0,50,0,100,0,100,40,50,40,0,40");
  EXPECT_EQ(a.upper.size(), 3u);
  EXPECT_EQ(a.lower.size(), 3u);
  EXPECT_EQ(a.lower.front(), (Point2{0, 40}));
}

TEST(Ctw1500, FourteenVertexLine) {
  std::string line;
  for (int i = 0; i < 7; ++i) line += std::to_string(10 * i) + ",0,";
  for (int i = 6; i >= 0; --i) line += std::to_string(10 * i) + ",20" + (i ? "," : "");
  const AnnotationPolygon a = parse_ctw1500(line);
  EXPECT_EQ(a.upper.size(), 7u);
  EXPECT_EQ(a.lower.size(), 7u);
}

TEST(Ctw1500, BadTokenCounts) {
  std::string line;
  for (int i = 0; i < 27; ++i) line += std::to_string(i) + (i < 26 ? "," : "");
  EXPECT_THROW(parse_ctw1500(line, 3), ParseError);
  try {
    parse_ctw1500("1,2,x,4,5,6,7,8", 12);
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 12u);
  }
}

TEST(Icdar2015, Quads) {
  const AnnotationPolygon a = parse_icdar2015("0,0,10,0,10,5,0,5,hello");
  EXPECT_EQ(a.ring().size(), 4u);
  EXPECT_FALSE(a.ignore);
  EXPECT_EQ(a.transcription, "hello");
  EXPECT_TRUE(parse_icdar2015("0,0,10,0,10,5,0,5,###").ignore);
  EXPECT_EQ(parse_icdar2015("0,0,10,0,10,5,0,5,a,b,c").transcription, "a,b,c");
  EXPECT_THROW(parse_icdar2015("0,0,10,0,10,5,0,5"), ParseError);
}

TEST(MsraTd500, Rectangles) {
  const AnnotationPolygon a = parse_msra_td500("0 0 10 20 30 40 0");
  const std::vector<Point2> expected{{10, 20}, {40, 20}, {40, 60}, {10, 60}};
  const auto ring = a.ring();
  ASSERT_EQ(ring.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(ring[i].x, expected[i].x, 1e-12);
    EXPECT_NEAR(ring[i].y, expected[i].y, 1e-12);
  }
  EXPECT_TRUE(parse_msra_td500("3 1 10 20 30 40 0").ignore);

  // A square rotated by a quarter turn covers itself.
  const auto sq = parse_msra_td500("0 0 0 0 10 10 1.5707963267948966").ring();
  for (const auto& p : sq) {
    const bool corner = (std::abs(p.x) < 1e-6 || std::abs(p.x - 10) < 1e-6) &&
                        (std::abs(p.y) < 1e-6 || std::abs(p.y - 10) < 1e-6);
    EXPECT_TRUE(corner) << p.x << "," << p.y;
  }
  EXPECT_THROW(parse_msra_td500("0 0 10 20 30 40"), ParseError);
  EXPECT_THROW(parse_msra_td500("0 0 10 20 30 nan 0"), ParseError);
}

TEST(TotalText, Polygons) {
  EXPECT_EQ(parse_totaltext("4,0,0,10,0,10,5,0,5").ring().size(), 4u);
  const AnnotationPolygon arc = parse_totaltext("10,0,10,10,5,20,4,30,5,40,10,40,20,30,15,20,14,10,15,0,20");
  EXPECT_EQ(arc.upper.size(), 5u);
  EXPECT_EQ(arc.lower.size(), 5u);
  EXPECT_TRUE(parse_totaltext("4,0,0,10,0,10,5,0,5,###").ignore);
  EXPECT_THROW(parse_totaltext("5,0,0,10,0,10,5,0,5,2,2"), ParseError);
  EXPECT_THROW(parse_totaltext("6,0,0,10,0,10,5,0,5"), ParseError);
}

TEST(AnnotationText, DirectivesCommentsAndClipping) {
  const std::string text = "\xEF\xBB\xBF# image_size 50 40\n# comment\n\n0,0,60,0,60,20,0,20,a\n";
  const DatasetRecord rec = parse_annotation_text(text, AnnotationFormat::Icdar2015, "img");
  EXPECT_EQ(rec.image_size.width, 50);
  EXPECT_EQ(rec.image_size.height, 40);
  ASSERT_EQ(rec.annotations.size(), 1u);
  for (const auto& p : rec.annotations[0].ring()) EXPECT_LE(p.x, 50.0);
  EXPECT_FALSE(rec.diagnostics.empty());

  const DatasetRecord inferred = parse_annotation_text("0,0,60,0,60,20,0,20,a\n", AnnotationFormat::Icdar2015, "i");
  EXPECT_EQ(inferred.image_size.width, 61);
  EXPECT_EQ(inferred.image_size.height, 21);
}

TEST(AnnotationText, ErrorsCarryTheLineNumber) {
  EXPECT_EQ(parse_error_line("0,0,10,0,10,5,0,5,a\n\n0,0,oops\n", AnnotationFormat::Icdar2015), 3u);
  EXPECT_EQ(parse_error_line("# image_size 100 100\n4,0,0,1,1,1,0,0,1\n", AnnotationFormat::TotalText), 2u);
}

TEST(Fixtures, ParseFormatParseIsAFixedPoint) {
  const std::pair<const char*, AnnotationFormat> dirs[] = {{"ctw1500", AnnotationFormat::Ctw1500},
                                                           {"icdar2015", AnnotationFormat::Icdar2015},
                                                           {"msra_td500", AnnotationFormat::MsraTd500},
                                                           {"totaltext", AnnotationFormat::TotalText}};
  std::size_t files = 0;
  for (const auto& [dir, f] : dirs) {
    for (const auto& entry : fs::directory_iterator(kFixtures / dir)) {
      ++files;
      const DatasetRecord first = load_annotation_file(entry.path(), f);
      EXPECT_FALSE(first.annotations.empty()) << entry.path();
      const std::string text1 = format_annotation_text(first, f);
      const DatasetRecord second = parse_annotation_text(text1, f, first.image_id);
      ASSERT_EQ(first.annotations.size(), second.annotations.size()) << entry.path();
      for (std::size_t k = 0; k < first.annotations.size(); ++k) {
        expect_same(first.annotations[k], second.annotations[k], 1e-6);
      }
      EXPECT_EQ(format_annotation_text(second, f), text1) << entry.path();
    }
  }
  EXPECT_GE(files, 8u);
}

TEST(Fixtures, CorruptFilesAreRejected) {
  EXPECT_THROW(load_annotation_file(kFixtures / "corrupt" / "short.txt", AnnotationFormat::Icdar2015), ParseError);
  EXPECT_THROW(load_annotation_file(kFixtures / "corrupt" / "garbage.txt", AnnotationFormat::Ctw1500), ParseError);
  EXPECT_THROW(load_annotation_file(kFixtures / "missing.txt", AnnotationFormat::Ctw1500), Error);
}

TEST(Msrr, HeaderLayout) {
  RasterFile r;
  r.grid = RasterGrid{2, 2, 1};
  r.planes = {std::vector<float>(4, 0.0f)};
  const auto bytes = encode_msrr(r);
  ASSERT_EQ(bytes.size(), kMsrrHeaderSize + 16);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MSRR");
  EXPECT_EQ(bytes[4], 1);   // version, little-endian
  EXPECT_EQ(bytes[8], 2);   // width
  EXPECT_EQ(bytes[12], 2);  // height
  EXPECT_EQ(bytes[16], 1);  // stride
  EXPECT_EQ(bytes[20], 1);  // channels
}

TEST(Msrr, FixedEndianness) {
  RasterFile r;
  r.grid = RasterGrid{1, 1, 4};
  r.planes = {{1.0f}};
  const auto bytes = encode_msrr(r);
  // 1.0f = 0x3F800000 stored little-endian.
  EXPECT_EQ(bytes[24], 0x00);
  EXPECT_EQ(bytes[25], 0x00);
  EXPECT_EQ(bytes[26], 0x80);
  EXPECT_EQ(bytes[27], 0x3F);
}

TEST(Msrr, RandomRoundTripsAreByteIdentical) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dim(1, 40), chans(1, 4), stride(1, 8);
  std::normal_distribution<float> val(0.0f, 10.0f);
  const fs::path dir = scratch_dir("msrr");
  for (int trial = 0; trial < 20; ++trial) {
    RasterFile r;
    r.grid = RasterGrid{dim(rng), dim(rng), stride(rng)};
    const int c = chans(rng);
    for (int k = 0; k < c; ++k) {
      std::vector<float> plane(static_cast<std::size_t>(r.grid.width * r.grid.height));
      for (auto& v : plane) v = val(rng);
      r.planes.push_back(std::move(plane));
    }
    const auto bytes = encode_msrr(r);
    const RasterFile back = decode_msrr(bytes);
    EXPECT_EQ(back.grid.width, r.grid.width);
    EXPECT_EQ(back.grid.stride, r.grid.stride);
    EXPECT_EQ(back.planes, r.planes);
    EXPECT_EQ(encode_msrr(back), bytes);

    const fs::path p = dir / ("r" + std::to_string(trial) + ".msrr");
    write_raster(p, r);
    EXPECT_EQ(encode_msrr(read_raster(p)), bytes);
  }
}

TEST(Msrr, MalformedInputs) {
  RasterFile r;
  r.grid = RasterGrid{3, 2, 1};
  r.planes = {std::vector<float>(6, 0.5f), std::vector<float>(6, 1.0f), std::vector<float>(6, -1.0f)};
  const auto good = encode_msrr(r);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_msrr(bad_magic), FormatError);
  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(decode_msrr(bad_version), FormatError);
  EXPECT_THROW(decode_msrr(std::span(good.data(), good.size() - 1)), FormatError);
  EXPECT_THROW(decode_msrr(std::span(good.data(), 10)), FormatError);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(decode_msrr(trailing), FormatError);
}

TEST(Msrr, LabelAndPredictionRasters) {
  LabelRaster lab(RasterGrid{5, 4, 4});
  lab.mask(1, 1) = 1;
  lab.dist_x(1, 1) = -3.5;
  lab.dist_y(1, 1) = 2.25;
  lab.ignore_mask(4, 3) = 1;
  const fs::path dir = scratch_dir("label");
  write_label_raster(dir / "l.msrr", lab);
  const LabelRaster back = read_label_raster(dir / "l.msrr");
  EXPECT_EQ(back.mask, lab.mask);
  EXPECT_EQ(back.dist_x, lab.dist_x);
  EXPECT_EQ(back.ignore_mask, lab.ignore_mask);
  EXPECT_EQ(back.grid.stride, 4);

  const PredictionRaster from_label = read_prediction_raster(dir / "l.msrr");
  EXPECT_EQ(from_label.prob(1, 1), 1.0);

  PredictionRaster pred(RasterGrid{3, 3, 1});
  pred.prob(0, 0) = 0.25;
  write_prediction_raster(dir / "p.msrr", pred);
  EXPECT_EQ(read_prediction_raster(dir / "p.msrr").prob, pred.prob);
  EXPECT_THROW(read_label_raster(dir / "p.msrr"), FormatError);

  pred.prob(0, 0) = 1.5;
  EXPECT_THROW(prediction_from_raster_file(to_raster_file(pred)), Error);
}

TEST(Detections, FormatAndParse) {
  Detection d;
  d.polygon = Polygon({{0, 0}, {10, 0}, {0, 10}});
  d.score = 0.9;
  const std::string text = format_detections(std::span(&d, 1));
  EXPECT_EQ(text, "0.900,3,0.000,0.000,10.000,0.000,0.000,10.000\n");
  const auto back = parse_detections(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_NEAR(back[0].score, 0.9, 1e-3);
  EXPECT_EQ(back[0].polygon.vertices(), d.polygon.vertices());

  EXPECT_EQ(format_detections({}), "");
  EXPECT_TRUE(parse_detections("").empty());

  try {
    parse_detections("0.5,3,0,0,1,0,0,1\n0.5,4,0,0,1,0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_detections("1.5,3,0,0,1,0,0,1\n"), ParseError);
  EXPECT_THROW(parse_detections("0.5,2,0,0,1,0\n"), ParseError);
}

TEST(Detections, FileRoundTripWithinTolerance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 500.0), s(0.0, 1.0);
  std::vector<Detection> dets;
  for (int k = 0; k < 10; ++k) {
    Detection d;
    const Point2 c{u(rng), u(rng)};
    d.polygon = Polygon({c, c + Point2{40.123456, 1.0}, c + Point2{38.0, 20.987654}, c + Point2{-1.5, 19.0}});
    d.score = s(rng);
    dets.push_back(d);
  }
  const fs::path p = scratch_dir("dets") / "d.txt";
  write_detections(p, dets);
  const auto back = read_detections(p);
  ASSERT_EQ(back.size(), dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) {
    EXPECT_NEAR(back[k].score, dets[k].score, 5e-4 + 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(back[k].polygon[i].x, dets[k].polygon[i].x, 5e-4 + 1e-9);
      EXPECT_NEAR(back[k].polygon[i].y, dets[k].polygon[i].y, 5e-4 + 1e-9);
    }
  }
}

// A million random and mutated inputs across the four line parsers: each
// either parses or throws ParseError, nothing else.
TEST(Fuzz, ParsersOnlyThrowParseErrors) {
  const std::string seeds[] = {"0,0,50,0,100,0,100,40,50,40,0,40", "0,0,10,0,10,5,0,5,hello",
                               "0 0 10 20 30 40 0.3", "4,0,0,10,0,10,5,0,5,###"};
  const char alphabet[] = "0123456789,.-+eE #xnaif\t\r";
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> byte(0, 255), pick(0, sizeof alphabet - 2), op(0, 4);
  std::size_t parsed = 0, rejected = 0;
  for (int iter = 0; iter < 1'000'000; ++iter) {
    const auto f = static_cast<AnnotationFormat>(iter % 4);
    std::string s = seeds[iter % 4];
    const int edits = 1 + iter % 5;
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = s.empty() ? 0 : static_cast<std::size_t>(rng() % (s.size() + 1));
      switch (op(rng)) {
        case 0:
          s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), alphabet[pick(rng)]);
          break;
        case 1:
          if (pos < s.size()) s.erase(pos, 1);
          break;
        case 2:
          if (pos < s.size()) s[pos] = alphabet[pick(rng)];
          break;
        case 3:
          if (pos < s.size()) s[pos] = static_cast<char>(byte(rng));
          break;
        default:
          s = s.substr(0, pos);
      }
    }
    try {
      parse_annotation_line(s, f, 1);
      ++parsed;
    } catch (const ParseError& e) {
      ASSERT_EQ(e.line(), 1u);
      ++rejected;
    }
  }
  EXPECT_GT(parsed, 0u);
  EXPECT_GT(rejected, 0u);
}
