// Runs the manin_cli executable and checks exit codes and JSON artifacts.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MANIN_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, RadiusConstantWeights) {
  const auto r = run("radius --weights constant --q 1");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_NEAR(j.at("value").get<double>(), 1.0, 1e-2);
  EXPECT_EQ(j.at("artifact"), "radius");
  EXPECT_EQ(j.at("config").at("weights").at("kind"), "constant");
}

TEST(Cli, RadiusFactorialIsInfinite) {
  const auto j = parse(run("radius --weights factorial --q polar:1,0.5"));
  EXPECT_EQ(j.at("value"), "inf");
  EXPECT_TRUE(j.at("infinite").get<bool>());
}

TEST(Cli, CoherentOutsidePhaseSpaceExitsThree) {
  EXPECT_EQ(run("coherent --weights constant --q 1 --lambda 1.5").code, 3);
}

TEST(Cli, CoherentInsideSucceeds) {
  const auto r = run("coherent --weights factorial --q i --lambda 0.5");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_TRUE(j.contains("residual") || j.contains("state"));
}

TEST(Cli, BadConfigExitsTwo) {
  EXPECT_EQ(run("radius --weights bogus").code, 2);
  EXPECT_EQ(run("radius --q 0").code, 2);
  EXPECT_EQ(run("--no-such-flag").code, 2);
}

TEST(Cli, OrderTooHighExitsFour) {
  EXPECT_EQ(run("measure --weights factorial --q 1 --solver moments --order 20").code, 4);
}

TEST(Cli, DeterministicJson) {
  const auto a = run("measure --weights factorial --q 1 --order 8");
  const auto b = run("measure --weights factorial --q 1 --order 8");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFromStdinAndOverrides) {
  const auto path = std::filesystem::temp_directory_path() / "manin_cli_test_config.json";
  std::ofstream(path) << R"({"weights": {"kind": "constant", "params": {"scale": 4}}, "q": [2, 0]})";
  const auto r = run("radius --q 1 --config - < " + path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = parse(r);
  EXPECT_EQ(j.at("config").at("weights").at("params").at("scale"), 4.0);
  EXPECT_NEAR(j.at("value").get<double>(), 1.0, 1e-2);
}

TEST(Cli, OutDirectoryArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "manin_cli_test_out";
  std::filesystem::remove_all(dir);
  const auto r = run("symbols --weights factorial --q 1 --kind annihilation --cutoff 60 --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  ASSERT_TRUE(std::filesystem::exists(dir / "symbols.json"));
  std::ifstream in(dir / "symbols.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("artifact"), "symbols");
  bool csv = false;
  for (const auto& e : std::filesystem::directory_iterator(dir)) csv = csv || e.path().extension() == ".csv";
  EXPECT_TRUE(csv);
  std::filesystem::remove_all(dir);
}

TEST(Cli, VerifyPasses) {
  const auto r = run("verify");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(parse(r).at("passed").get<bool>());
}
