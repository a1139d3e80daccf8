#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliRun {
  int code;
  std::string out;  // stdout only
  std::string all;  // stdout followed by stderr
};

std::string source_path(const std::string& rel) { return std::string(TAILPROD_SOURCE_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run(const std::string& args, const std::string& env = "") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out = (dir / "tailprod_cli_out.txt").string(), err = (dir / "tailprod_cli_err.txt").string();
  const std::string cmd = env + " '" + std::string(TAILPROD_CLI) + "' " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  CliRun r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), ""};
  r.all = r.out + slurp(err);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, AnalyzeExample3) {
  const CliRun r = run("analyze " + source_path("problems/example3.json"));
  EXPECT_EQ(r.code, 0) << r.all;
  EXPECT_TRUE(contains(r.out, "index: -17/4 (≈ -4.25)")) << r.out;
  EXPECT_TRUE(contains(r.out, "constant: 128/483 (≈ 0.26501)")) << r.out;
}

TEST(Cli, AnalyzeJson) {
  const CliRun r = run("analyze --json " + source_path("problems/breiman.json"));
  EXPECT_EQ(r.code, 0) << r.all;
  EXPECT_TRUE(contains(r.out, "\"value\": \"4/3\"")) << r.out;
  EXPECT_TRUE(contains(r.out, "\"status\": \"certified\"")) << r.out;
}

TEST(Cli, AnalyzeNonUnique) {
  const CliRun r = run("analyze " + source_path("problems/nonunique.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.all, "optimal solution not unique")) << r.all;
  EXPECT_TRUE(contains(r.all, "unique_optimum")) << r.all;
}

TEST(Cli, AnalyzeInfiniteMoment) {
  const CliRun r = run("analyze " + source_path("tests/data/infinite_moment.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "status: infinite_moment")) << r.all;
}

TEST(Cli, InputErrors) {
  const CliRun ragged = run("analyze " + source_path("tests/data/ragged.json"));
  EXPECT_EQ(ragged.code, 1);
  EXPECT_TRUE(contains(ragged.all, "A[1]")) << ragged.all;
  const CliRun syntax = run("analyze " + source_path("tests/data/syntax_error.json"));
  EXPECT_EQ(syntax.code, 1);
  EXPECT_TRUE(contains(syntax.all, "line 3")) << syntax.all;
  EXPECT_EQ(run("analyze /nonexistent/problem.json").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST(Cli, VerifyBreiman) {
  const std::string args = "verify " + source_path("problems/breiman.json") +
                           " --x-grid 10,100,1000 --samples 1000000 --seed 42 --oracle";
  const CliRun first = run(args);
  ASSERT_EQ(first.code, 0) << first.all;
  std::istringstream lines(first.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x,hits,N,p_hat,normalizer,ratio,stderr");
  int rows = 0;
  while (std::getline(lines, line) && !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(contains(first.out, "prng: xoshiro256**  seed: 42")) << first.out;
  EXPECT_TRUE(contains(first.out, "oracle slope")) << first.out;
  EXPECT_TRUE(contains(first.out, "analytic constant: 4/3")) << first.out;
  const CliRun second = run(args);
  EXPECT_EQ(first.out, second.out);
}

TEST(Cli, VerifyCsvFileIsReproducible) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "tailprod_a.csv").string(), b = (dir / "tailprod_b.csv").string();
  const std::string base = "verify " + source_path("problems/two_by_two.json") + " --x-grid 3,10 --samples 100000 --seed 7 --chunks 4";
  ASSERT_EQ(run(base + " --threads 1 --out " + a).code, 0);
  ASSERT_EQ(run(base + " --threads 3 --out " + b).code, 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, VerifyErrors) {
  const std::string problem = source_path("problems/breiman.json");
  EXPECT_EQ(run("verify " + problem + " --x-grid 10,100 --samples 0").code, 1);
  EXPECT_EQ(run("verify " + problem + " --x-grid 100,10").code, 1);
  EXPECT_EQ(run("verify " + problem).code, 1);
  EXPECT_EQ(run("verify " + source_path("problems/nonunique.json") + " --x-grid 10,100 --samples 10").code, 2);
}

TEST(Cli, Vertices) {
  const CliRun r = run("vertices " + source_path("problems/nonunique.json"));
  EXPECT_EQ(r.code, 0) << r.all;
  EXPECT_TRUE(contains(r.out, "distinct optimal point(s)")) << r.out;
  const CliRun tight = run("vertices " + source_path("problems/example3.json"), "TAILPROD_ENUM_BUDGET=3");
  EXPECT_EQ(tight.code, 2);
  EXPECT_TRUE(contains(tight.all, "TAILPROD_ENUM_BUDGET")) << tight.all;
}
