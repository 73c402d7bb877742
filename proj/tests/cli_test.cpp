// Copyright 2026 The Concept Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <sstream>

#include "concept_forge_cli/cli.hpp"
#include "test_util.hpp"

namespace concept_forge {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "concept_forge");
  std::ostringstream out;
  std::ostringstream err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Drops the leading "# config_hash=..." line.
std::string body(const std::string& text) { return text.substr(text.find('\n') + 1); }

constexpr const char* kSmallConfig = R"(
[generation]
seed = 4
scenes = 150

[noise]
sigma = 0.0

[evaluation]
questions = 400
)";

class CliRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir = new TempDir("cli");
    spit(*dir / "small.toml", kSmallConfig);
    std::string out = dir->path() / "run";
    std::string cfg = dir->path() / "small.toml";
    ASSERT_EQ(run({"generate", "--config", cfg, "--out", out}).code, 0);
    Result ind = run({"induce", "--out", out, "--svg"});
    ASSERT_EQ(ind.code, 0) << ind.err;
    Result ev = run({"evaluate", "--out", out});
    ASSERT_EQ(ev.code, 0) << ev.err;
  }
  static void TearDownTestSuite() { delete dir; }
  static std::string out_dir() { return dir->path() / "run"; }
  static TempDir* dir;
};

TempDir* CliRun::dir = nullptr;

TEST_F(CliRun, WritesArtifacts) {
  for (const char* f : {"corpus.jsonl", "manifest.json", "config.toml", "boundaries.json",
                        "gamma_unary.bin", "gamma_binary.bin", "labeled_unary.jsonl",
                        "labeled_binary.jsonl", "hierarchy.txt", "hierarchy.json",
                        "ground_truth_hierarchy.txt", "theta_unary.csv", "theta_binary.csv",
                        "conditional_unary.csv", "conditional_binary.csv", "theta_unary.svg",
                        "excluded_words.tsv", "questions.jsonl", "sufficiency.csv",
                        "sufficiency.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out_dir()) / f)) << f;
  }
}

TEST_F(CliRun, NoiselessHierarchyMatchesGolden) {
  std::string induced = slurp(std::filesystem::path(out_dir()) / "hierarchy.txt");
  EXPECT_EQ(induced.rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(body(induced), slurp(std::filesystem::path(CONCEPT_FORGE_GOLDEN_DIR) /
                                 "clevr_hierarchy.txt"));
}

TEST_F(CliRun, ReportHasAllFamiliesAndConsistentTotals) {
  std::istringstream in(body(slurp(std::filesystem::path(out_dir()) / "sufficiency.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "family,total,correct,unanswerable,failed,agreement,noise_sigma");
  std::vector<std::string> names;
  long sum = 0;
  long overall = -1;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string name, total, correct;
    std::getline(ss, name, ',');
    std::getline(ss, total, ',');
    std::getline(ss, correct, ',');
    EXPECT_EQ(total, correct) << name;
    if (name == "overall") {
      overall = std::stol(total);
    } else {
      names.push_back(name);
      sum += std::stol(total);
    }
  }
  EXPECT_EQ(names, (std::vector<std::string>{"count", "exist", "comp num", "query attr",
                                             "comp attr"}));
  EXPECT_EQ(overall, 400);
  EXPECT_EQ(sum, 400);
}

TEST_F(CliRun, DistanceToSelfIsZero) {
  Result r = run({"analyze", "distance", "--out", out_dir(), "0:0", "0:0", "1:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(std::filesystem::path(out_dir()) / "analysis_distance.csv"));
  std::string line;
  std::getline(in, line);  // hash
  std::getline(in, line);  // header
  std::getline(in, line);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
}

TEST_F(CliRun, AnalogyRuns) {
  Result r = run({"analyze", "analogy", "--out", out_dir(), "0:0 - 0:1 + 1:0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("k0,k_sub,k_add,target,retrieved"), std::string::npos);
}

TEST_F(CliRun, MetricsOnSyntheticAnnotationsArePerfect) {
  Result r = run({"analyze", "metrics", "--out", out_dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(std::filesystem::path(out_dir()) / "analysis_metrics.csv");
  EXPECT_NE(csv.find("\n3,0.5,1,1,1,"), std::string::npos) << csv;
}

TEST_F(CliRun, BadReferencesExitFour) {
  EXPECT_EQ(run({"analyze", "distance", "--out", out_dir(), "0:0", "9999:0"}).code, 4);
  EXPECT_EQ(run({"analyze", "distance", "--out", out_dir(), "0:0", "0:99"}).code, 4);
  EXPECT_EQ(run({"analyze", "distance", "--out", out_dir(), "zero", "0:0"}).code, 4);
  EXPECT_EQ(run({"analyze", "analogy", "--out", out_dir(), "0:0 + 0:1"}).code, 4);
}

TEST(Cli, RerunsAreByteIdentical) {
  TempDir dir("cli_rerun");
  spit(dir / "small.toml", kSmallConfig);
  std::string cfg = dir.path() / "small.toml";
  for (const char* name : {"a", "b"}) {
    std::string out = dir.path() / name;
    ASSERT_EQ(run({"generate", "--config", cfg, "--out", out, "--noise-sigma", "1"}).code, 0);
    ASSERT_EQ(run({"induce", "--out", out}).code, 0);
    ASSERT_EQ(run({"evaluate", "--out", out, "--questions", "200"}).code, 0);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir.path() / "a")) {
    auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(dir.path() / "b" / name)) << name;
  }
}

TEST(Cli, CorruptConfigExitsTwoWithLine) {
  TempDir dir("cli_config");
  spit(dir / "bad.toml", "[generation]\nseed = 1\nscenes = \"lots\"\n");
  Result r = run({"generate", "--config", (dir.path() / "bad.toml").string(), "--out",
                  (dir.path() / "run").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, MissingArtifactExitsThree) {
  TempDir dir("cli_missing");
  Result r = run({"evaluate", "--out", (dir.path() / "empty").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(run({"induce", "--out", (dir.path() / "empty").string()}).code, 3);
}

TEST(Cli, UsageErrorsExit64) {
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"generate", "--seed", "-3"}).code, 64);
  EXPECT_EQ(run({}).code, 64);
}

}  // namespace
}  // namespace concept_forge
