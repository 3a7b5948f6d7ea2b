#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GPSCATTER_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json without_meta(std::string text) {
  auto j = nlohmann::json::parse(text);
  j.erase("meta");
  return j;
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("gpscatter_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("energies --init dark:0.5 --s 0.4 --tau 4").code, 2);
  EXPECT_EQ(run("scatter --init dark:0.5 --bogus").code, 2);
  EXPECT_EQ(run("verify --suite medium").code, 2);
  EXPECT_EQ(run("scatter --init /nonexistent/field.txt").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, MismatchedFieldFileIsRejected) {
  const auto d = scratch_dir("badn");
  std::ofstream(d / "f.txt") << "# gpfield v1 L=4 n=4 x0=-2\n-2 1 0\n-1 1 0\n0 1 0\n";
  EXPECT_EQ(run("scatter --init " + (d / "f.txt").string()).code, 2);
}

TEST(Cli, ScatterFindsTheDarkSolitonEigenvalue) {
  const auto r = run("scatter --init dark:0.5 --eigen --tau-grid 4:8:3");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["eigenvalues"].size(), 1u);
  EXPECT_NEAR(j["eigenvalues"][0]["lambda"].get<double>(), -std::sin(0.5), 1e-8);
  EXPECT_EQ(j["imag_axis"].size(), 3u);
}

TEST(Cli, OutputIsIndependentOfThreadCount) {
  const std::string m = "metric --a dark:0.5 --b bump:0.1:1 --s 1";
  const auto a = run("--threads 1 " + m), b = run("--threads 4 " + m);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(without_meta(a.out), without_meta(b.out));
  EXPECT_NEAR(nlohmann::json::parse(a.out)["distance"].get<double>(), 2.058272045066227, 1e-9);

  const std::string s = "scatter --init bump:0.2:1 --xi-grid 0.5:3:6 --tau-grid 2.5:10:4";
  const auto c = run("--threads 1 " + s), e = run("--threads 3 " + s);
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(without_meta(c.out), without_meta(e.out));
}

TEST(Cli, EnvironmentVariableCapsThreads) {
  const auto r = run("metric --a one --b dark:0.3 --s 0");
  const std::string cmd = "GPSCATTER_THREADS=2 " + std::string(GPSCATTER_CLI) + " metric --a one --b dark:0.3 --s 0";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  EXPECT_EQ(pclose(p), 0);
  EXPECT_EQ(without_meta(out), without_meta(r.out));
}

TEST(Cli, SimulateWritesSnapshotsAndDrift) {
  const auto d = scratch_dir("sim");
  const auto r = run("simulate --eq gp --init dark:0.5 --dt 1e-3 --t-final 0.01 --snap 5 --out " + d.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(d / "snap_00000.txt"));
  EXPECT_TRUE(fs::exists(d / "snap_00002.txt"));
  std::ifstream drift(d / "drift.csv");
  std::string header;
  std::getline(drift, header);
  EXPECT_EQ(header, "t,observable,value,rel_drift");

  std::ifstream snap(d / "snap_00002.txt");
  std::string first;
  std::getline(snap, first);
  EXPECT_EQ(first.rfind("# gpfield v1", 0), 0u);
}

TEST(Cli, MiuraCheckReportsSmallMismatch) {
  const auto r = run("miura-check --init black --t-final 0.2");
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(nlohmann::json::parse(r.out)["max_mismatch"].get<double>(), 1e-4);
}
