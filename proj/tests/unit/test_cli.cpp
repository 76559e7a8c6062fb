#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "app.hpp"
#include "grid.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "thermosense");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = thermosense::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) { header = true; continue; }
    ++n;
  }
  return n;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("thermosense_test_" + name);
}

}  // namespace

TEST(Grid, Parsing) {
  using thermosense::cli::parse_grid;
  EXPECT_EQ(parse_grid("1,2.5,3", "x").size(), 3u);
  const auto g = parse_grid("0:1:0.25", "x");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_EQ(parse_grid("0.5", "x").size(), 1u);
  EXPECT_THROW(parse_grid("0:1:0", "x"), thermosense::cli::ConfigError);
  EXPECT_THROW(parse_grid("a,b", "x"), thermosense::cli::ConfigError);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
  EXPECT_EQ(invoke({"fig1", "--beta", "abc"}).code, 2);
  EXPECT_EQ(invoke({"fig1", "--n", "7"}).code, 2);
  EXPECT_EQ(invoke({"fig4b", "--n", "14"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--quantities", "entropy"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, SinglePointGrid) {
  const Result r = invoke({"fig1", "--beta", "20", "--n", "100", "--h-over-j", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(r.out), 1u);
  EXPECT_NE(r.out.find("# command = fig1"), std::string::npos);
}

TEST(Cli, JsonOutput) {
  const Result r =
      invoke({"--format", "json", "fig2", "--beta", "100", "--n", "100", "--h-over-j", "0:0.5:0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"records\""), std::string::npos);
}

TEST(Cli, EstimatorAndValidColumns) {
  const Result f3 = invoke({"fig3", "--beta", "100", "--n", "100", "--j-over-h", "0.5,1.5"});
  ASSERT_EQ(f3.code, 0) << f3.err;
  EXPECT_NE(f3.out.find("Jz->J"), std::string::npos);
  const Result f4 = invoke({"fig4b", "--beta", "2", "--n", "6", "--h-over-j", "1"});
  ASSERT_EQ(f4.code, 0) << f4.err;
  EXPECT_NE(f4.out.find("JxSquared->h"), std::string::npos);
  EXPECT_NE(f4.out.find("oracle"), std::string::npos);
}

TEST(Cli, ValidateMinimal) {
  const Result ok = invoke({"validate", "--minimal"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_GT(data_rows(ok.out), 5u);
  const Result strict = invoke({"validate", "--minimal", "--tolerance-scale", "0"});
  EXPECT_EQ(strict.code, 1);
  EXPECT_NE(strict.err.find("checks failed"), std::string::npos);
}

TEST(Cli, ProtocolIsReproducible) {
  const std::vector<std::string> args{"--seed", "123", "--threads", "3", "protocol", "--n",
                                      "100,300",  "--runs", "4", "--beta", "100", "--kmax", "2"};
  const Result a = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  std::vector<std::string> single = args;
  single[3] = "1";
  const Result b = invoke(single);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("mt19937_64"), std::string::npos);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto ini = temp_file("cfg.ini");
  {
    std::ofstream f(ini);
    f << "[fig1]\nbeta=20\nn=100\nh-over-j=0:0.5:0.25\n";
  }
  const Result from_file = invoke({"--config", ini.string(), "fig1"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(data_rows(from_file.out), 3u);
  const Result overridden = invoke({"--config", ini.string(), "fig1", "--h-over-j", "0.1"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(data_rows(overridden.out), 1u);
  std::filesystem::remove(ini);
  EXPECT_EQ(invoke({"--config", "/nonexistent/x.ini", "fig1"}).code, 2);
}

TEST(Cli, WritesToFile) {
  const auto path = temp_file("out.csv");
  const Result r = invoke({"--out", path.string(), "fig1", "--beta", "20", "--n", "100",
                           "--h-over-j", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(data_rows(ss.str()), 1u);
  std::filesystem::remove(path);
}
