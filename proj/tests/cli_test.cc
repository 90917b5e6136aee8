#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.h"

namespace {

namespace fs = std::filesystem;
using cfx::testing::DataPath;

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cfx_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

// Runs the CLI with stdout and stderr sent to files; returns the exit code.
int RunCli(const std::string& args, const std::string& tag = "run") {
  const std::string cmd = std::string(CFX_CLI_PATH) + " " + args + " > " +
                          Scratch(tag + ".out").string() + " 2> " +
                          Scratch(tag + ".err").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string DrugArgs() {
  return "--data " + DataPath("drug200_replica.csv") + " --target Drug";
}

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli(""), 1);
  EXPECT_EQ(RunCli("generate " + DrugArgs()), 1);  // missing --seed/--out
  EXPECT_EQ(RunCli("bogus"), 1);
  EXPECT_EQ(RunCli("generate " + DrugArgs() + " --seed 1 --out " +
                Scratch("x.json").string() + " --format xml"),
            1);
  EXPECT_EQ(RunCli("generate " + DrugArgs() + " --seed 1 --k -1 --out " +
                Scratch("x.json").string()),
            1);
}

TEST(CliTest, DataErrors) {
  EXPECT_EQ(RunCli("schema --data /nonexistent.csv --target Drug"), 2);
  EXPECT_EQ(RunCli("schema --data " + DataPath("drug200_replica.csv") + " --target Nope"), 2);
  EXPECT_EQ(RunCli("oracle " + DrugArgs() + " --row 0 --model-in /nonexistent.json"), 2);
}

TEST(CliTest, OracleBudget) {
  EXPECT_EQ(RunCli("oracle " + DrugArgs() + " --row 0 --budget 10"), 3);
  ASSERT_EQ(RunCli("oracle --data " + DataPath("car_replica.csv") +
                    " --target class --row 0 --k 1",
                "oracle"),
            0);
  const auto j = nlohmann::json::parse(Slurp(Scratch("oracle.out")));
  EXPECT_EQ(j["evaluated"], 15);
}

TEST(CliTest, SchemaPrintsJson) {
  ASSERT_EQ(RunCli("schema " + DrugArgs(), "schema"), 0);
  const auto j = nlohmann::json::parse(Slurp(Scratch("schema.out")));
  EXPECT_EQ(j["features"].size(), 5u);
}

TEST(CliTest, GenerateIsByteIdentical) {
  const std::string common = "generate " + DrugArgs() +
                             " --seed 11 --k 2 --pop 60 --gens 4 --show-row 0";
  ASSERT_EQ(RunCli(common + " --out " + Scratch("a.json").string(), "a"), 0);
  ASSERT_EQ(RunCli(common + " --out " + Scratch("b.json").string() + " --threads 3", "b"), 0);
  EXPECT_EQ(Slurp(Scratch("a.json")), Slurp(Scratch("b.json")));
  EXPECT_EQ(Slurp(Scratch("a.out")), Slurp(Scratch("b.out")));
  EXPECT_NE(Slurp(Scratch("a.out")).find("Unconstrained"), std::string::npos);

  ASSERT_EQ(RunCli(common + " --format csv --out " + Scratch("a.csv").string()), 0);
  ASSERT_EQ(RunCli(common + " --format csv --out " + Scratch("b.csv").string()), 0);
  EXPECT_EQ(Slurp(Scratch("a.csv")), Slurp(Scratch("b.csv")));
}

TEST(CliTest, TrainedModelCanBeReused) {
  const std::string model = Scratch("model.json").string();
  ASSERT_EQ(RunCli("train " + DrugArgs() + " --seed 5 --model-out " + model), 0);
  const std::string common = "generate " + DrugArgs() + " --seed 2 --pop 40 --gens 2";
  ASSERT_EQ(RunCli(common + " --out " + Scratch("t.json").string()), 0);
  ASSERT_EQ(RunCli(common + " --model-in " + model + " --out " + Scratch("m.json").string()), 0);
  const auto a = nlohmann::json::parse(Slurp(Scratch("t.json")));
  const auto b = nlohmann::json::parse(Slurp(Scratch("m.json")));
  EXPECT_EQ(a["rows"].size(), 200u);
  EXPECT_EQ(b["rows"].size(), 200u);
}

}  // namespace
