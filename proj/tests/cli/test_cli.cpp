#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fracoam/config.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("fracoam_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const std::string cmd = std::string(FRACOAM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int count_lines(const fs::path& p) const {
    std::ifstream in(p);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    return n;
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DecomposePrintsCapturedPowerAndWritesSpectrum) {
  const auto r = run("decompose --out " + path("a").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("captured power (order <= 7): 0.42"), std::string::npos) << r.out;
  EXPECT_EQ(count_lines(path("a/spectrum.csv")), 37);
  EXPECT_TRUE(fs::exists(path("a/run_manifest.ini")));
  EXPECT_FALSE(fs::exists(path("a/spectrum.svg")));

  const auto r20 = run("decompose --max-order 20 --plots --out " + path("b").string());
  ASSERT_EQ(r20.code, 0) << r20.out;
  EXPECT_EQ(count_lines(path("b/spectrum.csv")), 232);
  EXPECT_TRUE(fs::exists(path("b/spectrum.svg")));
}

TEST_F(CliTest, StepOverrideOnMeasuredConfig) {
  const auto r = run("--config " FRACOAM_CONFIG_DIR "/measured_plates.ini decompose --step 3.5 --out " +
                     path("m").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("captured power (order <= 7): 0.4"), std::string::npos) << r.out;
  std::istringstream manifest(slurp(path("m/run_manifest.ini")));
  const auto cfg = fracoam::parse_run_config(manifest);
  EXPECT_EQ(cfg.plate_s.step_index, 3.5);
  EXPECT_EQ(cfg.plate_i.step_index, -3.48);
}

TEST_F(CliTest, ZeroStepPlateHasSingleCoefficient) {
  ASSERT_EQ(run("decompose --step 0 --out " + path("z").string()).code, 0);
  std::ifstream in(path("z/spectrum.csv"));
  std::string line;
  std::getline(in, line);
  int nonzero = 0;
  while (std::getline(in, line)) {
    const double power = std::stod(line.substr(line.rfind(',') + 1));
    if (power > 1e-20) {
      ++nonzero;
      EXPECT_EQ(line.substr(0, 4), "0,0,");
    }
  }
  EXPECT_EQ(nonzero, 1);
}

TEST_F(CliTest, FringeWritesOneCsvPerIdlerAngle) {
  const auto r = run("fringe --samples 32 --plots --out " + path("f").string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* a : {"0", "90", "180", "270"}) {
    const auto p = path(std::string("f/fringe_alpha_i_") + a + ".csv");
    ASSERT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(count_lines(p), 33);
  }
  EXPECT_TRUE(fs::exists(path("f/fringe.svg")));
  EXPECT_NE(r.out.find("visibility 1.000000"), std::string::npos);
}

TEST_F(CliTest, SeparableAndIntegerFringesAreFlat) {
  const auto sep = run("fringe --model separable --alpha-i 0 --out " + path("s").string());
  ASSERT_EQ(sep.code, 0) << sep.out;
  EXPECT_NE(sep.out.find("visibility 0.000000"), std::string::npos) << sep.out;
  write("int.ini", "[plate_s]\nstep_index = 3\n[plate_i]\nstep_index = -3\n");
  const auto integer = run("--config " + path("int.ini").string() + " fringe --alpha-i 0,90 --out " + path("i").string());
  ASSERT_EQ(integer.code, 0) << integer.out;
  EXPECT_NE(integer.out.find("visibility 0.000000  (max 1.000000"), std::string::npos) << integer.out;
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRunsAndThreads) {
  const std::string cfg = "--config " FRACOAM_CONFIG_DIR "/measured_plates.ini --seed 5 ";
  ASSERT_EQ(run(cfg + "--threads 1 fringe --samples 16 --out " + path("t1").string()).code, 0);
  ASSERT_EQ(run(cfg + "fringe --samples 16 --threads 3 --out " + path("t3").string()).code, 0);
  for (const auto& e : fs::directory_iterator(path("t1"))) {
    if (e.path().extension() != ".csv") continue;
    EXPECT_EQ(slurp(e.path()), slurp(path("t3") / e.path().filename())) << e.path();
  }
}

TEST_F(CliTest, SchmidtReportsBothConventionsAndDimensionality) {
  const auto r = run("schmidt --method approx --pump-index-sweep 1.5 1.8 0.02 --bandwidth 125000 --k-lower 3700 --out " +
                     path("k").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("approximate K (pump_index 1): 2350.32"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("in 3600..3800"), std::string::npos);
  EXPECT_NE(r.out.find("(3700, 125000)"), std::string::npos);
  EXPECT_NE(slurp(path("k/schmidt_report.txt")).find("(3700, 125000)"), std::string::npos);
  EXPECT_NE(slurp(path("k/schmidt.kv")).find("result0.k_number="), std::string::npos);
}

TEST_F(CliTest, UnconvergedExactSchmidtExitsWithThree) {
  const auto r = run("schmidt --method exact --grid-size 512 --out " + path("x").string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_TRUE(fs::exists(path("x/schmidt_report.txt")));
}

TEST_F(CliTest, BandwidthThenSchmidtReadsTheEstimate) {
  const auto r = run("bandwidth --out " + path("b").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto txt = slurp(path("b/bandwidth.txt"));
  const auto pos = txt.find("modes=");
  ASSERT_NE(pos, std::string::npos);
  const double n = std::stod(txt.substr(pos + 6));
  EXPECT_GT(n, 6e4);
  EXPECT_LT(n, 2.5e5);
  const auto s = run("schmidt --method approx --out " + path("b").string());
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("dimensionality: K = 2350.32"), std::string::npos) << s.out;
}

TEST_F(CliTest, TrainAndFarfield) {
  const auto t = run("train --out " + path("t").string());
  ASSERT_EQ(t.code, 0) << t.out;
  EXPECT_NE(t.out.find("train efficiency: 1.000000"), std::string::npos);
  const auto rot = run("train --rotate-deg 180 --out " + path("t").string());
  EXPECT_NE(rot.out.find("train efficiency: 0.000000"), std::string::npos) << rot.out;
  write("same.ini", "[plate_i]\nstep_index = 3.5\n");
  const auto warn = run("--config " + path("same.ini").string() + " train --out " + path("t").string());
  EXPECT_NE(warn.out.find("not complementary"), std::string::npos);
  write("small.ini", "[grid]\nn_radial = 32\nn_azimuthal = 64\n");
  const auto ff = run("--config " + path("small.ini").string() + " farfield --plots --out " + path("ff").string());
  ASSERT_EQ(ff.code, 0) << ff.out;
  EXPECT_EQ(count_lines(path("ff/farfield.csv")), 32 * 64 + 1);
  EXPECT_TRUE(fs::exists(path("ff/farfield.svg")));
}

TEST_F(CliTest, ExitCodesForFailures) {
  write("bad.ini", "[plate_s]\nbogus = 1\n");
  EXPECT_EQ(run("--config " + path("bad.ini").string() + " decompose --out " + path("e").string()).code, 2);
  EXPECT_EQ(run("decompose --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("fringe --samples 4 --out " + path("e").string()).code, 2);
  EXPECT_EQ(run("decompose --max-order 60 --out " + path("e").string()).code, 3);
  write("blocker", "not a directory");
  EXPECT_EQ(run("decompose --out " + path("blocker/sub").string()).code, 4);
  EXPECT_EQ(run("--help").code, 0);
}
