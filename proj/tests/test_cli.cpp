#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "mpsehmm/cli.hpp"
#include "mpsehmm/serialize.hpp"

using namespace mpsehmm;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Real process exit status of the installed binary.
int exit_status(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" MPSEHMM_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::filesystem::path scratch(const std::string& leaf) {
  const auto p = std::filesystem::temp_directory_path() / ("mpsehmm_cli_" + leaf);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Catalog, ListShowsEveryEntry) {
  const Outcome r = run({"catalog", "list"});
  EXPECT_EQ(r.code, cli::kExitOk);
  for (const char* name : {"ghz", "cluster", "aklt", "aklt-derived", "theta"})
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
}

TEST(Verify, GhzPasses) {
  const Outcome r = run({"verify", "theorem1", "--name", "ghz", "--N", "3", "--n", "3,4,5"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("pass"), std::string::npos);
  EXPECT_EQ(exit_status("verify theorem1 --name ghz --N 3 --n 3,4,5"), 0);
}

TEST(Decompose, AkltIsInfeasibleWithWitness) {
  const Outcome r = run({"decompose", "--name", "aklt"});
  EXPECT_EQ(r.code, cli::kExitVerificationFailed);
  EXPECT_NE(r.out.find("infeasible, site 1, hidden index 1"), std::string::npos) << r.out;
  EXPECT_EQ(exit_status("decompose --name aklt"), 1);
  EXPECT_EQ(run({"decompose", "--name", "cluster"}).code, cli::kExitOk);
}

TEST(Extract, AkltThirds) {
  const Outcome r = run({"extract", "--name", "aklt"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("0.333333333333"), std::string::npos);
  EXPECT_NE(r.out.find("0.666666666667"), std::string::npos);
}

TEST(Entropy, GhzBoundHolds) {
  const Outcome r = run({"entropy", "--name", "ghz", "--N", "3"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.69314718056"), std::string::npos);
}

TEST(Errors, UsageFailuresExitTwo) {
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"build-mps", "--tensors", "/nonexistent/t.json", "--sites", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"build-mps", "--name", "ghz", "--sites", "two"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"build-mps", "--name", "ghz", "--model", "x.json", "--sites", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"build-mps", "--name", "nope", "--sites", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(exit_status("bogus"), 2);
  EXPECT_EQ(exit_status("build-mps --tensors /nonexistent/t.json --sites 2"), 2);
}

TEST(Limits, SizeCapFromEnvironment) {
  EXPECT_EQ(exit_status("build-mps --name ghz --sites 5", std::string(cli::kSizeCapEnv) + "=4"), 2);
  EXPECT_EQ(exit_status("build-mps --name ghz --sites 5", std::string(cli::kSizeCapEnv) + "=64"), 0);
  EXPECT_EQ(run({"--cap", "4", "build-mps", "--name", "ghz", "--sites", "5"}).code, cli::kExitUsage);
}

TEST(Export, TensorsRoundTripThroughBuildMps) {
  const auto dir = scratch("export");
  const Outcome ex = run({"catalog", "export", "cluster", "--out-dir", dir.string()});
  ASSERT_EQ(ex.code, cli::kExitOk) << ex.err;
  ASSERT_TRUE(std::filesystem::exists(dir / "cluster.tensors.json"));
  ASSERT_TRUE(std::filesystem::exists(dir / "cluster.model.json"));

  const Outcome from_file = run({"--format", "json", "build-mps", "--tensors", (dir / "cluster.tensors.json").string(),
                                 "--sites", "3"});
  const Outcome from_name = run({"--format", "json", "build-mps", "--name", "cluster", "--sites", "3"});
  ASSERT_EQ(from_file.code, cli::kExitOk) << from_file.err;
  EXPECT_EQ(Json::parse(from_file.out).at("entries"), Json::parse(from_name.out).at("entries"));

  const Outcome model = run({"verify", "theorem1", "--model", (dir / "cluster.model.json").string(), "--N", "3",
                             "--n", "3,4"});
  EXPECT_EQ(model.code, cli::kExitOk) << model.err;
  std::filesystem::remove_all(dir);
}

TEST(Format, JsonOutputParses) {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {"--format", "json", "extract", "--name", "aklt"},
           {"--format", "json", "decompose", "--name", "aklt"},
           {"--format", "json", "entropy", "--name", "cluster", "--N", "2"},
           {"--format", "json", "build-ehmm-state", "--name", "ghz", "--n", "2", "--which", "on"},
           {"--format", "json", "catalog", "list"}}) {
    const Outcome r = run(args);
    EXPECT_LE(r.code, 1) << r.err;
    EXPECT_TRUE(Json::accept(r.out)) << args[2];
  }
  const Json d = Json::parse(run({"--format", "json", "decompose", "--name", "aklt"}).out);
  EXPECT_EQ(d.at("witness").at("hidden_index"), 1);
}

TEST(Random, SeededModelsAreReproducible) {
  const std::vector<std::string> args{"--format", "json", "--seed", "5", "build-mps", "--name", "random",
                                      "--m",      "2",    "--d",    "3", "--sites",   "2"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Selftest, Passes) {
  const auto dir = scratch("selftest");
  const Outcome r = run({"selftest", "--report", (dir / "report.json").string()});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}
