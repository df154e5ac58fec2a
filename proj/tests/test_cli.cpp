#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using minmax::cli::run_cli;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("minmax_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), {"--out-dir", dir_.string()});
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveExitCodes) {
  EXPECT_EQ(run({"solve", "--problem", "f4", "--x0", "1", "--y0", "2"}).code, minmax::cli::kOk);
  const auto other = run({"solve", "--problem", "cubic_min", "--solver", "pure_newton", "--x0", "-0.5"});
  EXPECT_EQ(other.code, minmax::cli::kOther);
  EXPECT_NE(other.out.find("EquilibriumNotMinmax"), std::string::npos);
  EXPECT_EQ(run({"solve", "--problem", "nosuch"}).code, minmax::cli::kUsage);
  EXPECT_EQ(run({"solve", "--problem", "f1", "--solver", "adam"}).code, minmax::cli::kUsage);
  EXPECT_EQ(run({}).code, minmax::cli::kUsage);
}

TEST_F(CliTest, SolveWithParametersAndTrace) {
  const auto r = run({"--trace", "solve", "--problem", "constrained_fixture", "--x0", "3", "--y0", "0"});
  EXPECT_EQ(r.code, minmax::cli::kOk) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "trace.csv"));
}

TEST_F(CliTest, SmallBenchIsFastAndDeterministic) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = run({"bench", "--trials", "10"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 5.0);
  ASSERT_TRUE(fs::exists(dir_ / "summary.csv"));
  std::ifstream f1(dir_ / "summary.csv");
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const auto b = run({"bench", "--trials", "10"});
  std::ifstream f2(dir_ / "summary.csv");
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(s1, s2);
  EXPECT_TRUE(fs::exists(dir_ / "trials.csv"));
}

TEST_F(CliTest, ConfigFileKeysAreChecked) {
  const fs::path good = dir_ / "good.ini";
  std::ofstream(good) << "seed=3\n";
  EXPECT_EQ(run({"--config", good.string(), "solve", "--problem", "f4"}).code, minmax::cli::kOk);
  const fs::path bad = dir_ / "bad.ini";
  std::ofstream(bad) << "no_such_key=1\n";
  EXPECT_EQ(run({"--config", bad.string(), "solve", "--problem", "f4"}).code, minmax::cli::kUsage);
}

TEST_F(CliTest, MpcRegimeChangeIsReported) {
  const auto r = run({"mpc", "--enforce-instability", "after:2", "--steps", "3", "--horizon", "2"});
  EXPECT_EQ(r.code, minmax::cli::kOk) << r.err;
  EXPECT_NE(r.out.find("regime change at t=2"), std::string::npos) << r.out;
  EXPECT_EQ(run({"mpc", "--enforce-instability", "sometimes"}).code, minmax::cli::kUsage);
}
