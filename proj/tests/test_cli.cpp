#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "xorgame/experiments.hpp"
#include "xorgame/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string("\"") + XORGAME_CLI + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t k = fread(buf, 1, sizeof buf, pipe)) out.append(buf, k);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("xorgame_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kGhz = "2 4\n1 1 1 0\n1 2 2 1\n2 1 2 1\n2 2 1 1\n";

}  // namespace

TEST_F(Cli, ClassifyGhz) {
  const CliRun r = run("classify " + write("ghz.txt", kGhz));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("pseudotelepathy: true"), std::string::npos);
  EXPECT_NE(r.out.find("c_perfect: false"), std::string::npos);
  EXPECT_NE(r.out.find("agreement:"), std::string::npos);
}

TEST_F(Cli, ClassifyExitCodes) {
  EXPECT_EQ(run("classify " + write("one.txt", "1 1\n1 1 1 0\n")).code, 0);
  EXPECT_EQ(run("classify " + write("neither.txt", "1 2\n1 1 1 0\n1 1 1 1\n")).code, 2);
  EXPECT_EQ(run("classify " + write("bad.txt", "1 1\n1 1 x 0\n")).code, 64);
  EXPECT_EQ(run("classify " + (dir_ / "missing.txt").string()).code, 66);
  EXPECT_EQ(run("").code, 64);
  EXPECT_EQ(run("frobnicate").code, 64);
}

TEST_F(Cli, VerifyPerfectStrategy) {
  const CliRun r = run("verify " + write("ghz.txt", kGhz) + " " + write("z.txt", "0 1/2\n0 1/2\n0 1/2\n"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("perfect: true"), std::string::npos);
  std::istringstream in(r.out);
  std::string key;
  double formula = 0, simulated = 0;
  while (in >> key) {
    if (key == "score:") in >> formula;
    if (key == "simulated_score:") in >> simulated;
  }
  EXPECT_NEAR(formula, 1.0, 1e-9);
  EXPECT_NEAR(formula, simulated, 1e-9);
}

TEST_F(Cli, VerifyZeroStrategy) {
  const CliRun r = run("verify " + write("ghz.txt", kGhz) + " " + write("z.txt", "0 0 0 0 0 0\n"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("perfect: false"), std::string::npos);
  EXPECT_NE(r.out.find("score: 0.25"), std::string::npos);
  EXPECT_NE(r.out.find("simulated_score: 0.25"), std::string::npos);
  EXPECT_NE(r.out.find("classical_score: 1/4"), std::string::npos);
}

TEST_F(Cli, VerifyWrongLength) {
  EXPECT_EQ(run("verify " + write("ghz.txt", kGhz) + " " + write("z.txt", "0 1/2 0\n")).code, 65);
}

TEST_F(Cli, SampleIsDeterministicAndRoundTrips) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run("sample --n 8 --m 22 --count 3 --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(run("sample --n 8 --m 22 --count 3 --seed 7 --out " + b.string()).code, 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const std::string text = slurp(entry.path());
    EXPECT_EQ(text, slurp(b / entry.path().filename()));
    EXPECT_EQ(text.rfind("# xorgame sample", 0), 0u);
    const xorgame::XorGame g = xorgame::parse_game(text);
    EXPECT_EQ(g.n(), 8);
    EXPECT_EQ(g.m(), 22u);
    std::ostringstream again;
    xorgame::write_game(again, g);
    EXPECT_EQ(xorgame::parse_game(again.str()), g);
  }
  EXPECT_EQ(files, 3);
}

TEST_F(Cli, CrossSectionCsv) {
  const CliRun r = run("crosssection --n 8 --m 8:40 --samples 300 --seed 1");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# xorgame crosssection n=8 m=8:40 samples=300 seed=1 dedup=triple", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, xorgame::csv_header);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 33);
}

TEST_F(Cli, OutputIndependentOfThreads) {
  const auto one = dir_ / "one.csv", four = dir_ / "four.csv";
  ASSERT_EQ(run("sweep --n 6,9 --ratio 2:3:0.25 --samples 200 --seed 3 --threads 1 --out " + one.string()).code, 0);
  ASSERT_EQ(run("sweep --n 6,9 --ratio 2:3:0.25 --samples 200 --seed 3 --threads 4 --out " + four.string()).code, 0);
  EXPECT_EQ(slurp(one), slurp(four));
  EXPECT_FALSE(slurp(one).empty());
}

TEST_F(Cli, MaxPseudoSummary) {
  const CliRun r = run("maxpseudo --n 8 --m 15:28 --samples 500 --table " + (dir_ / "t.csv").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("n,m_star,ratio,mu,ci_pseudo,samples,seed,dedup\n8,"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "t.csv").find(xorgame::csv_header), std::string::npos);
}

TEST_F(Cli, FlagValidation) {
  EXPECT_EQ(run("crosssection --n 8 --m 40:8 --samples 10").code, 64);
  EXPECT_EQ(run("crosssection --n 8 --m 8:9 --samples 0").code, 64);
  EXPECT_EQ(run("crosssection --n 8 --m 8:9 --samples 10 --dedup pairs").code, 64);
  EXPECT_EQ(run("sweep --n 8 --ratio 3:1 --samples 10").code, 64);
  EXPECT_EQ(run("sample --n 1 --m 2").code, 64);
}
