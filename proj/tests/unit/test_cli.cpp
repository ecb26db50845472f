#include <gtest/gtest.h>

#include <sstream>

#include "cmix/cli.hpp"
#include "cmix/io.hpp"
#include "cmix/pipeline.hpp"
#include "test_util.hpp"

namespace cmix {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cmix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config_text(const std::string& extra_filter = "", const std::string& noise = "") {
  const auto fx = [](const char* n) { return testing::fixture(n).string(); };
  return "[input]\nsource = " + fx("source.tagged") + "\ntarget = " + fx("target.en") +
         "\noverrides = " + fx("overrides.tsv") +
         "\n[output]\ndir = out\n[run]\nseed = 5\nthreads = 2\n[aligner]\niterations = 3\n"
         "[filter]\n" + (extra_filter.empty() ? "cmi_min = 20\ncmi_max = 40\n" : extra_filter) +
         "[noise]\nrates = " + (noise.empty() ? "switch=0.30,omission=0.12,typo=0.12,shuffle=0.06" : noise) + "\n";
}

TEST(Cli, UnknownCommandExitsTwo) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
  EXPECT_NE(r.err.find("usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, VersionAndHelp) {
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out.rfind("cmix 0.3.0 (tables ", 0), 0u);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"align", "--help"}).code, 0);
}

TEST(Cli, MissingRequiredOptionExitsTwo) {
  EXPECT_EQ(run({"noise", "--in", "x", "--out", "y"}).code, 2);  // no --seed
  EXPECT_EQ(run({"align", "--source", "x"}).code, 2);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto r = run({"stats", "--in", "/nonexistent/file.tsv"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("cmix: ", 0), 0u);
}

TEST(Config, MinimalConfigParses) {
  const auto dir = testing::scratch_dir("cli_config_ok");
  testing::write_text(dir / "p.ini", config_text());
  const auto cfg = load_pipeline_config((dir / "p.ini").string());
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_EQ(cfg.out_dir, dir / "out");
  EXPECT_EQ(cfg.aligner.iterations, 3);
  EXPECT_DOUBLE_EQ(cfg.filter.cmi_hi, 40.0);
  EXPECT_EQ(cfg.recipe, "rcmt_roman");
}

TEST(Config, InlineCommentsAreIgnored) {
  const auto dir = testing::scratch_dir("cli_config_comments");
  std::string text = config_text();
  text.replace(text.find("seed = 5"), 8, "seed = 5        ; required");
  text.replace(text.find("threads = 2"), 11, "threads = 2\t# per stage");
  testing::write_text(dir / "p.ini", text);
  const auto cfg = load_pipeline_config((dir / "p.ini").string());
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.threads, 2u);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_pipeline_config("/nonexistent/pipeline.ini"), ConfigError);
}

TEST(Config, NoiseSumAboveOneIsAValidationError) {
  const auto dir = testing::scratch_dir("cli_config_noise");
  testing::write_text(dir / "p.ini", config_text("", "switch=0.6,omission=0.3,typo=0.2,shuffle=0.1"));
  const auto r = run({"pipeline", "--config", (dir / "p.ini").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("noise"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(Config, InvertedCmiWindowIsAValidationError) {
  const auto dir = testing::scratch_dir("cli_config_cmi");
  testing::write_text(dir / "p.ini", config_text("cmi_min = 40\ncmi_max = 20\n"));
  const auto r = run({"pipeline", "--config", (dir / "p.ini").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("cmi window inverted"), std::string::npos) << r.err;
}

TEST(Config, EveryProblemIsListed) {
  const auto dir = testing::scratch_dir("cli_config_many");
  testing::write_text(dir / "p.ini",
                      "[input]\nsource = missing.tagged\n[run]\nthreads = 0\n[filter]\ncolour = red\n"
                      "[assembly]\nrecipe = zcmt\n");
  try {
    load_pipeline_config((dir / "p.ini").string());
    FAIL();
  } catch (const ConfigError& e) {
    std::string all;
    for (const auto& p : e.problems()) all += p + "\n";
    for (const char* needle : {"input.source", "input.target", "run.seed", "run.threads", "colour", "corpus.bn"})
      EXPECT_NE(all.find(needle), std::string::npos) << needle << "\n" << all;
  }
}

std::string strip_elapsed(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("elapsed_ms", 0) != 0) out += line + "\n";
  return out;
}

TEST(Pipeline, RerunsAreByteIdentical) {
  const auto dir = testing::scratch_dir("cli_pipeline_determinism");
  testing::write_text(dir / "p.ini", config_text());
  ASSERT_EQ(run({"pipeline", "--config", (dir / "p.ini").string(), "--out-dir", (dir / "a").string()}).code, 0);
  // Same seed, different thread count.
  std::string text = config_text();
  text.replace(text.find("threads = 2"), 11, "threads = 1");
  testing::write_text(dir / "q.ini", text);
  ASSERT_EQ(run({"pipeline", "--config", (dir / "q.ini").string(), "--out-dir", (dir / "b").string()}).code, 0);

  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(dir / "b" / name)) << name;
    const std::string a = read_file(entry.path());
    const std::string b = read_file(dir / "b" / name);
    if (name.string().find("report") != std::string::npos) {
      std::string sa = strip_elapsed(a), sb = strip_elapsed(b);
      // Thread counts are recorded in the reports; nothing else may differ.
      for (auto* s : {&sa, &sb}) {
        std::string kept;
        std::istringstream in(*s);
        std::string line;
        while (std::getline(in, line))
          if (line.rfind("threads", 0) != 0) kept += line + "\n";
        *s = kept;
      }
      EXPECT_EQ(sa, sb) << name;
    } else {
      EXPECT_EQ(a, b) << name;
    }
    ++compared;
  }
  EXPECT_GE(compared, 20u);
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "train.src"));
}

}  // namespace
}  // namespace cmix
