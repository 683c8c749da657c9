#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using std::string;
namespace fs = std::filesystem;

namespace {

const fs::path kBin = TEXTSHAPE_BIN;
const fs::path kFixtures = TEXTSHAPE_FIXTURES;

struct Outcome {
  int code = -1;
  string out;
  string err;
};

string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const string& name) {
  const fs::path dir = fs::temp_directory_path() / ("textshape_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome run(const string& args, const string& env = "") {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "textshape_cli_io";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const string cmd = "env -u TEXTSHAPE_CONFIG " + env + " " + q(kBin) + " " + args + " >" + q(out) + " 2>" + q(err);
  const int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t count_ext(const fs::path& dir, const string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

fs::path single_rect_dir(const string& name) {
  const fs::path dir = scratch(name) / "gt";
  fs::create_directories(dir);
  std::ofstream(dir / "rect.txt") << "# image_size 240 80\n20,20,120,20,220,20,220,60,120,60,20,60\n";
  return dir;
}

string value_of(const string& report, const string& key) {
  std::istringstream in(report);
  string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

}  // namespace

TEST(Cli, EncodeFixtures) {
  const fs::path out = scratch("encode");
  const Outcome r = run("encode " + q(kFixtures / "ctw1500") + " " + q(out) + " -f ctw1500");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_ext(out, ".msrr"), 3u);
  EXPECT_TRUE(fs::exists(out / "run_config.json"));
}

TEST(Cli, EncodeEmptyDirectory) {
  const fs::path in = scratch("empty_in"), out = scratch("empty_out");
  const Outcome r = run("encode " + q(in) + " " + q(out));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_ext(out, ".msrr"), 0u);
}

TEST(Cli, EncodeCorruptFileNamesFileAndLine) {
  const fs::path in = scratch("corrupt_in"), out = scratch("corrupt_out");
  fs::copy_file(kFixtures / "ctw1500" / "img_3.txt", in / "good.txt");
  std::ofstream(in / "bad.txt") << "0,0,10,0,10,10,0,10\n1,2,3\n";
  const Outcome r = run("encode " + q(in) + " " + q(out));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.txt"), string::npos) << r.err;
  EXPECT_NE(r.err.find("line 2"), string::npos) << r.err;
}

TEST(Cli, EncodeDecodeEvalPipeline) {
  const fs::path root = scratch("pipeline");
  const fs::path gt = kFixtures / "totaltext";
  ASSERT_EQ(run("encode " + q(gt) + " " + q(root / "labels") + " -f totaltext").code, 0);
  const Outcome dec = run("decode " + q(root / "labels") + " " + q(root / "dets"));
  ASSERT_EQ(dec.code, 0) << dec.err;
  EXPECT_EQ(count_ext(root / "dets", ".txt"), 2u);
  EXPECT_TRUE(fs::exists(root / "dets" / "run_config.json"));

  const Outcome ev = run("eval " + q(root / "dets") + " " + q(gt) + " -f totaltext -o " + q(root / "report.txt") +
                     " --per-image " + q(root / "per_image.csv"));
  ASSERT_EQ(ev.code, 0) << ev.err;
  const string report = slurp(root / "report.txt");
  EXPECT_EQ(value_of(report, "fscore").substr(0, 1), "1") << report;
  EXPECT_EQ(value_of(report, "ignored_dets"), "0") << report;  // ignore regions are never encoded
  EXPECT_EQ(value_of(report, "fn"), "0") << report;
  EXPECT_NE(slurp(root / "per_image.csv").find("img_2"), string::npos);
  EXPECT_TRUE(fs::exists(root / "run_config.json"));
}

TEST(Cli, EvalUnpairedIdsFailUnlessAllowed) {
  const fs::path root = scratch("unpaired");
  fs::create_directories(root / "dets");
  std::ofstream(root / "dets" / "nothing.txt") << "0.900,3,0,0,10,0,0,10\n";
  EXPECT_EQ(run("eval " + q(root / "dets") + " " + q(kFixtures / "ctw1500") + " -o " + q(root / "r.txt")).code, 1);
  EXPECT_EQ(run("--allow-unpaired eval " + q(root / "dets") + " " + q(kFixtures / "ctw1500") + " -o " +
                q(root / "r.txt"))
                .code,
            0);
}

TEST(Cli, RoundtripSingleRectangle) {
  const fs::path gt = single_rect_dir("rt_rect");
  const fs::path report = gt.parent_path() / "report.txt";
  const Outcome r = run("roundtrip " + q(gt) + " " + q(report));
  ASSERT_EQ(r.code, 0) << r.err;
  const string text = slurp(report);
  EXPECT_GE(std::stod(value_of(text, "mean_iou")), 0.95) << text;
  EXPECT_EQ(value_of(text, "count_preserved"), "1/1") << text;
  EXPECT_EQ(value_of(text, "status"), "pass");
}

TEST(Cli, RoundtripUnreachableThreshold) {
  const fs::path gt = single_rect_dir("rt_strict");
  const Outcome r = run("--min-mean-iou 0.999 roundtrip " + q(gt) + " " + q(gt.parent_path() / "report.txt"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(value_of(slurp(gt.parent_path() / "report.txt"), "status"), "fail");
}

TEST(Cli, RoundtripIsDeterministicUnderNoise) {
  const fs::path root = scratch("determinism");
  const string args = "--noise-sigma 1 --seed 17 roundtrip " + q(kFixtures / "ctw1500") + " ";
  ASSERT_EQ(run(args + q(root / "a.txt")).code, 0);
  ASSERT_EQ(run("--jobs 3 " + args + q(root / "b.txt")).code, 0);
  EXPECT_EQ(slurp(root / "a.txt"), slurp(root / "b.txt"));
}

TEST(Cli, ConfigFileAndEnvironment) {
  const fs::path gt = single_rect_dir("config");
  const fs::path root = gt.parent_path();
  std::ofstream(root / "strict.json") << "{\"min_mean_iou\": 0.999}\n";
  std::ofstream(root / "typo.json") << "{\"min_mean_iuo\": 0.5}\n";
  const string rt = "roundtrip " + q(gt) + " " + q(root / "report.txt");

  EXPECT_EQ(run("--config " + q(root / "strict.json") + " " + rt).code, 2);
  EXPECT_EQ(run(rt, "TEXTSHAPE_CONFIG=" + q(root / "strict.json")).code, 2);
  EXPECT_EQ(run("--min-mean-iou 0.5 " + rt, "TEXTSHAPE_CONFIG=" + q(root / "strict.json")).code, 0);
  EXPECT_EQ(run("--config " + q(root / "typo.json") + " " + rt).code, 1);

  const string written = slurp(root / "run_config.json");
  EXPECT_NE(written.find("\"min_mean_iou\": 0.5"), string::npos) << written;
}

TEST(Cli, RenderWritesSvgLayers) {
  const fs::path root = scratch("render");
  std::ofstream(root / "dets.txt") << "0.900,4,20,20,290,40,290,90,20,90\n";
  const Outcome r = run("render " + q(root / "out.svg") + " --gt " + q(kFixtures / "totaltext" / "img_1.txt") +
                    " -f totaltext --det " + q(root / "dets.txt") + " --quads");
  ASSERT_EQ(r.code, 0) << r.err;
  const string svg = slurp(root / "out.svg");
  std::size_t paths = 0;
  for (std::size_t p = svg.find("<path"); p != string::npos; p = svg.find("<path", p + 1)) ++paths;
  EXPECT_EQ(paths, 5u);  // 3 ground truths, 1 detection, 1 rectangle
  EXPECT_NE(svg.find("id=\"gt\""), string::npos);
  EXPECT_NE(svg.find("id=\"quad\""), string::npos);
}

TEST(Cli, Netplan) {
  const Outcome ok = run("netplan 512 512 2");
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("16x16"), string::npos) << ok.out;
  const Outcome bad = run("netplan 520 512 2");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("Conv5"), string::npos) << bad.err;
  EXPECT_EQ(run("netplan 512 512 1").code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(run("").code, 0);
  EXPECT_NE(run("frobnicate").code, 0);
  EXPECT_EQ(run("encode " + q(kFixtures / "ctw1500") + " /tmp/x -f coco").code, 1);
}
