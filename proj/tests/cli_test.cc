// Copyright 2026 The wsd-lp Authors
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

// Runs the wsd binary end to end on a small generated task.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "test_util.h"
#include "wsd/util.h"

namespace wsd {
namespace {

using testing::TempDir;

int RunCli(const std::string& args) {
  const std::string command =
      std::string(WSD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

int CountLines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    ASSERT_EQ(RunCli("gen-synthetic --out " + Q(dir_->path()) +
                  " --words 2 --lm-sentences 20 --labeled-per-sense 3"
                  " --unlabeled 20 --eval 15 --majority-share 0.7"),
              0);
    ASSERT_EQ(RunCli("train-lm -c " + Q(Config()) + " --epochs 1"), 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::filesystem::path Config() { return dir_->path() / "config.json"; }
  static std::filesystem::path Dir() { return dir_->path(); }

  static TempDir* dir_;
};

TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, TrainingIsByteIdentical) {
  const auto other = Dir() / "model2" / "lm";
  ASSERT_EQ(RunCli("train-lm -c " + Q(Config()) + " --epochs 1 --model " + Q(other)), 0);
  EXPECT_EQ(ReadFile(Dir() / "model" / "lm.weights.bin"),
            ReadFile(other.string() + ".weights.bin"));
  EXPECT_EQ(ReadFile(Dir() / "model" / "lm.vocab.txt"),
            ReadFile(other.string() + ".vocab.txt"));
}

TEST_F(CliTest, ClassifyIsDeterministicAndOrdered) {
  for (const char* method : {"nn", "lp", "mfs", "nn-bow"}) {
    const auto a = Dir() / (std::string("a-") + method + ".jsonl");
    const auto b = Dir() / (std::string("b-") + method + ".jsonl");
    ASSERT_EQ(RunCli("classify -c " + Q(Config()) + " --method " + method +
                  " --output " + Q(a)),
              0);
    ASSERT_EQ(RunCli("classify -c " + Q(Config()) + " --method " + method +
                  " --threads 2 --output " + Q(b)),
              0);
    const std::string text = ReadFile(a);
    EXPECT_EQ(text, ReadFile(b)) << method;
    EXPECT_EQ(CountLines(text), 30);
    EXPECT_EQ(text.find("\"id\":\"pw0.0\""), text.find("\"id\""));
  }
}

TEST_F(CliTest, SenseStoreFeedsNn) {
  const auto fresh = Dir() / "fresh.jsonl";
  ASSERT_EQ(RunCli("classify -c " + Q(Config()) + " --method nn --output " + Q(fresh)),
            0);
  ASSERT_EQ(RunCli("build-senses -c " + Q(Config())), 0);
  EXPECT_TRUE(std::filesystem::exists(Dir() / "model" / "senses.manifest.json"));
  const auto stored = Dir() / "stored.jsonl";
  ASSERT_EQ(RunCli("classify -c " + Q(Config()) + " --method nn --output " + Q(stored)),
            0);
  EXPECT_EQ(ReadFile(stored), ReadFile(fresh));
  std::filesystem::remove(Dir() / "model" / "senses.manifest.json");
}

TEST_F(CliTest, LpWithEmptyUnlabeledPool) {
  WriteFile(Dir() / "empty.jsonl", "");
  std::string config = ReadFile(Config());
  const auto pos = config.find("unlabeled.jsonl");
  config.replace(pos, std::string("unlabeled.jsonl").size(), "empty.jsonl");
  WriteFile(Dir() / "empty_pool.json", config);
  const auto out = Dir() / "lp-empty.jsonl";
  ASSERT_EQ(RunCli("classify -c " + Q(Dir() / "empty_pool.json") +
                " --method lp --output " + Q(out)),
            0);
  const std::string text = ReadFile(out);
  EXPECT_EQ(CountLines(text), 30);
  EXPECT_EQ(text.find("\"abstained\":true"), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesReportsPerMethod) {
  const auto out = Dir() / "eval_out";
  ASSERT_EQ(RunCli("evaluate -c " + Q(Config()) + " --output-dir " + Q(out) +
                " --methods mfs,nn,lp --sweep-density 98,95,90"),
            0);
  std::string prefix;
  for (const char* name : {"mfs", "nn-lm", "lp-lm"}) {
    const auto csv = ReadFile(out / (std::string("report-") + name + ".csv"));
    EXPECT_TRUE(std::filesystem::exists(out / (std::string("report-") + name + ".json")));
    EXPECT_TRUE(
        std::filesystem::exists(out / (std::string("predictions-") + name + ".jsonl")));
    const auto all = csv.find("\nall,");
    ASSERT_NE(all, std::string::npos);
    const std::string row = csv.substr(all + 1, csv.find('\n', all + 1) - all - 1);
    const std::string fingerprint = row.substr(row.rfind(',') + 1);
    EXPECT_TRUE(fingerprint.ends_with(std::string("-") + name)) << fingerprint;
    const std::string base = fingerprint.substr(0, fingerprint.find('-'));
    if (prefix.empty()) prefix = base;
    EXPECT_EQ(base, prefix);
  }
  EXPECT_EQ(CountLines(ReadFile(out / "sweep.csv")), 4);
}

TEST_F(CliTest, EvaluateExistingPredictions) {
  const auto preds = Dir() / "mfs-preds.jsonl";
  ASSERT_EQ(RunCli("classify -c " + Q(Config()) + " --method mfs --output " + Q(preds)),
            0);
  const auto out = Dir() / "scored";
  ASSERT_EQ(RunCli("evaluate -c " + Q(Config()) + " --output-dir " + Q(out) +
                " --predictions " + Q(preds)),
            0);
  EXPECT_TRUE(std::filesystem::exists(out / "report.csv"));

  // Dropping a line leaves ids without predictions.
  std::string text = ReadFile(preds);
  text.erase(0, text.find('\n') + 1);
  WriteFile(Dir() / "short.jsonl", text);
  EXPECT_EQ(RunCli("evaluate -c " + Q(Config()) + " --output-dir " + Q(out) +
                " --predictions " + Q(Dir() / "short.jsonl")),
            3);
}

TEST_F(CliTest, SweepCommand) {
  const auto out = Dir() / "sweep_out";
  ASSERT_EQ(RunCli("sweep-density -c " + Q(Config()) + " --output-dir " + Q(out) +
                " --percentiles 98,95,90,85"),
            0);
  EXPECT_EQ(CountLines(ReadFile(out / "sweep.csv")), 5);
}

TEST_F(CliTest, ConfigurationErrors) {
  EXPECT_EQ(RunCli("classify -c " + Q(Dir() / "nope.json")), 2);
  EXPECT_EQ(RunCli("classify"), 2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
  EXPECT_EQ(RunCli("classify -c " + Q(Config()) + " --method svm"), 2);
  EXPECT_EQ(RunCli("train-lm -c " + Q(Config()) + " --lm-text " +
                Q(Dir() / "missing.txt")),
            2);
  EXPECT_EQ(RunCli("classify -c " + Q(Config()) + " --input " + Q(Dir() / "none.jsonl")),
            2);
}

}  // namespace
}  // namespace wsd
