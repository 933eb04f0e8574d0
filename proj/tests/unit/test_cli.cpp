#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string("\"") + ADASCHED_CLI_PATH + "\" " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("adasched_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, ScheduleToStdout) {
  const auto o = run("schedule --steps 8");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("t,alpha_bar,snr,importance"), std::string::npos);
  EXPECT_NE(o.out.find("1,856,750,856,"), std::string::npos);
}

TEST(Cli, ScheduleToDirectory) {
  const auto dir = scratch("schedule");
  EXPECT_EQ(run("schedule --out " + dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "importance.csv"));
  EXPECT_TRUE(fs::exists(dir / "timesteps.csv"));
}

TEST(Cli, SampleIsByteIdenticalWithoutWallTime) {
  const auto dir = scratch("sample");
  const std::string args = "sample --batch 500 --seed 9 --omit-wall-time --out ";
  ASSERT_EQ(run(args + (dir / "a.json").string()).code, 0);
  ASSERT_EQ(run(args + (dir / "b.json").string() + " --threads 3").code, 0);
  const auto a = slurp(dir / "a.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b.json"));
  EXPECT_EQ(a.find("wall_time"), std::string::npos);
}

TEST(Cli, SampleWithConfigAndTrajectories) {
  const auto dir = scratch("config");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"mixture": "grid-2d", "steps": 4, "batch": 200, "clip_method": "tanh-balance"})";
  }
  const auto o = run("sample --config " + (dir / "cfg.json").string() + " --trajectories " +
                     (dir / "traj.csv").string() + " --trajectory-chains 2");
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("\"wasserstein1\""), std::string::npos);
  EXPECT_NE(o.out.find("wall_time"), std::string::npos);
  EXPECT_EQ(slurp(dir / "traj.csv").rfind("chain,visit,t,x0,x1", 0), 0u);
}

TEST(Cli, CompareSweep) {
  const auto o = run("compare --batch 200 --sweep variant=plain,gamma_i");
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out.rfind("row,timesteps,variant", 0), 0u);
  EXPECT_NE(o.out.find("\n1,adaptive,gamma_i,"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitOne) {
  EXPECT_EQ(run("sample --theta 3").code, 1);
  EXPECT_EQ(run("sample --mixture no-such-mixture").code, 1);
  EXPECT_EQ(run("sample --bogus-flag 1").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("compare --batch 10").code, 1);
  EXPECT_EQ(run("sample --config /nonexistent/cfg.json").code, 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
  const auto dir = scratch("numerical");
  {
    std::ofstream m(dir / "huge.json");
    m << R"({"components": [{"weight": 1, "mean": [1e308], "variance": 1e-300}]})";
  }
  EXPECT_EQ(run("sample --batch 10 --mixture " + (dir / "huge.json").string()).code, 2);
}
