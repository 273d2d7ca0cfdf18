// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult run(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out = (dir / "pmuplan_cli_out.txt").string();
  const std::string err = (dir / "pmuplan_cli_err.txt").string();
  const std::string cmd =
      std::string(PMUPLAN_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

nlohmann::json run_json(const std::string& args) {
  const CliResult r = run(args + " --out json");
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

bool contains(const std::string& text, const std::string& what) {
  return text.find(what) != std::string::npos;
}

const std::string kCompat = " --scope paper-compat";

TEST(CliCase, Info) {
  CliResult r = run("case info --case ieee14");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "14 buses, 20 branches"));
  r = run("case info --case ieee118");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "118 buses, 186 branches"));
}

TEST(CliCase, MissingFile) {
  const CliResult r = run("case info --case /no/such/case.m");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "/no/such/case.m"));
}

TEST(CliCase, JsonCaseFile) {
  const auto path = std::filesystem::temp_directory_path() / "pmuplan_two.json";
  std::ofstream(path) << R"({"name":"two","buses":[{"id":1},{"id":2}],
      "branches":[{"from":1,"to":2,"r":0,"x":1}]})";
  const CliResult r = run("case info --case " + path.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "two: 2 buses, 1 branches"));
  std::ofstream(path) << "{\"buses\": [,]}";
  const CliResult bad = run("case info --case " + path.string());
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.err, "line 1"));
}

TEST(CliMetrics, ReferenceRows) {
  const nlohmann::json doc =
      run_json("metrics --case ieee14" + kCompat + " --add - --add 5 --add 10,14");
  EXPECT_EQ(doc["schema"], "pmuplan.sensitivity/1");
  ASSERT_EQ(doc["rows"].size(), 3u);
  EXPECT_NEAR(doc["rows"][0]["sum"].get<double>(), 28.0, 1e-3);
  EXPECT_NEAR(doc["rows"][1]["sum"].get<double>(), 32.0, 1e-3);
  EXPECT_NEAR(doc["rows"][1]["average"].get<double>(), 0.7619, 1e-3);
  EXPECT_NEAR(doc["rows"][2]["average"].get<double>(), 0.7272, 1e-3);
  const CliResult md = run("metrics --case ieee14" + kCompat);
  EXPECT_TRUE(contains(md.out, "28.0000"));
}

TEST(CliMetrics, EmptyPlacement) {
  const CliResult r = run("metrics --case ieee14 --nu ''");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "empty"));
}

TEST(CliMetrics, UnobservableFullState) {
  const CliResult r = run("metrics --case ieee14 --nu 2,6,7");
  EXPECT_EQ(r.code, 3);
}

TEST(CliMetrics, BadOptions) {
  EXPECT_EQ(run("metrics --case ieee14 --scope sideways").code, 2);
  EXPECT_EQ(run("metrics --case ieee14 --nu 2,x").code, 2);
  EXPECT_EQ(run("metrics --case ieee14 --nu 99").code, 2);
  EXPECT_EQ(run("metrics --case ieee14 --nu 4 --channel-limit 4").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("metrics --no-such-flag").code, 2);
}

TEST(CliPlan, CompareMatchesReferenceValues) {
  const nlohmann::json doc = run_json("plan compare --case ieee14 --stages 10" + kCompat);
  const double budget[] = {0.7368, 0.7143, 0.6818, 0.6667, 0.6538,
                           0.6296, 0.6207, 0.6129, 0.6061, 0.5882};
  ASSERT_EQ(doc["stages"].size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(doc["stages"][i]["budget_value"].get<double>(), budget[i], 1e-3);
  }
  const CliResult md = run("plan compare --case ieee14 --stages 10" + kCompat);
  EXPECT_TRUE(contains(md.out, "greedy worse"));
}

TEST(CliPlan, GreedyTwoStages) {
  const nlohmann::json doc = run_json("plan greedy --case ieee14 --stages 2" + kCompat);
  ASSERT_EQ(doc["order"].size(), 2u);
  EXPECT_EQ(doc["order"][0], 8);
  EXPECT_NEAR(doc["stage_values"][1].get<double>(), 0.7143, 1e-3);
}

TEST(CliPlan, BudgetCapOn118) {
  const CliResult r = run("plan budget --case ieee118 --stages 20" + kCompat);
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(contains(r.err, "greedy"));
}

TEST(CliSubmod, Ieee14Audit) {
  const CliResult r = run("submod audit --case ieee14" + kCompat);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "90 triples: 78 submodular, 12 supermodular, 0 ties"));
  const nlohmann::json doc = run_json("submod audit --case ieee14" + kCompat);
  EXPECT_EQ(doc["submodular"], 78);
}

TEST(CliSubmod, CountOnly) {
  CliResult r = run("submod audit --case ieee118 --count-only");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "α = 6480"));
  r = run("submod count --case ieee14");
  EXPECT_TRUE(contains(r.out, "α = 90"));
}

TEST(CliSubmod, SizeOrdering) {
  EXPECT_EQ(run("submod audit --case ieee14 --a-size 13 --b-size 12").code, 2);
}

TEST(CliKnapsack, Demo) {
  CliResult r = run("knapsack demo");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "| [5,9) | x2, x3 | 9 |"));
  EXPECT_TRUE(contains(r.out, "| [6,9) | x1, x2 | 12 |"));
  r = run("knapsack demo --values 1 --weights 2 --method greedy --out csv");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "x1"));
  EXPECT_EQ(run("knapsack demo --values 1,2 --weights 2").code, 2);
}

TEST(CliDeterminism, ByteIdenticalRuns) {
  const std::string args = "plan compare --case ieee14 --stages 4" + kCompat;
  const CliResult a = run(args + " --parallel 1");
  const CliResult b = run(args + " --parallel 4");
  const CliResult c = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  const CliResult s1 = run("submod audit --case ieee14 --out json --parallel 1" + kCompat);
  const CliResult s2 = run("submod audit --case ieee14 --out json --parallel 3" + kCompat);
  EXPECT_EQ(s1.out, s2.out);
}

TEST(CliOutput, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "pmuplan_out.csv";
  std::filesystem::remove(path);
  const CliResult r = run("knapsack demo --out csv --output " + path.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(contains(slurp(path.string()), "objective"));
}

}  // namespace
