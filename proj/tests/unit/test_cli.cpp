// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "goalpred/cli.hpp"
#include "goalpred/error.hpp"

namespace goalpred {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "goalpred");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("goalpred_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  CliRun gen(const std::string& out, const std::string& seed = "3") {
    return run({"generate", "--seed", seed, "--segments", "12", "--duration-min", "3.1", "--duration-max", "3.3",
                "--subjects", "1,2,6", "--train-subjects", "1,2", "--out", p(out)});
  }

  fs::path dir_;
};

TEST_F(Cli, ExitCodesAreDistinct) {
  EXPECT_EQ(exit_code_for(ErrorKind::usage), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::io), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::parse), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::invariant), 5);
  EXPECT_EQ(exit_code_for(ErrorKind::numeric), 6);
  EXPECT_EQ(exit_code_for(ErrorKind::training), 7);
}

TEST_F(Cli, GenerateTrainPredictPipeline) {
  ASSERT_EQ(gen("data").code, 0);
  for (const char* f : {"all", "train", "test"}) EXPECT_TRUE(fs::exists(p(std::string("data/") + f)));

  const CliRun t = run({"train", "--data", p("data/train"), "--variant", "lstm_buff", "--hidden", "4", "--epochs", "2",
                     "--window-stride", "40", "--out", p("m")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("epoch 2 loss"), std::string::npos);
  ASSERT_TRUE(fs::exists(p("m/lstm_buff.model")));

  const CliRun pr = run({"predict", "--model", p("m/lstm_buff.model"), "--data", p("data/test"), "--out", p("pred")});
  ASSERT_EQ(pr.code, 0) << pr.err;
  const std::string preds = slurp(p("pred/predictions.txt"));
  EXPECT_EQ(preds.rfind("# segment frame_index", 0), 0u);
  EXPECT_GT(std::count(preds.begin(), preds.end(), '\n'), 10);
}

TEST_F(Cli, TrainingIsByteDeterministic) {
  ASSERT_EQ(gen("data").code, 0);
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(run({"train", "--data", p("data/train"), "--hidden", "3", "--epochs", "1", "--window-stride", "40",
                   "--seed", "5", "--out", p(out)})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(p("a/lstm_buff.model")), slurp(p("b/lstm_buff.model")));
  ASSERT_EQ(gen("data2").code, 0);
  EXPECT_EQ(slurp(p("data/all")), slurp(p("data2/all")));
}

TEST_F(Cli, BaselinesWriteReportFiles) {
  ASSERT_EQ(gen("data").code, 0);
  const CliRun r = run({"baselines", "--data", p("data/test"), "--out", p("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(p("b/summary.json")));
  for (const char* m : {"hand_euc", "head_ori", "hand_ori", "cumulative_gaze", "gaze"}) {
    EXPECT_TRUE(summary.at("methods").at(m).at("auc").is_number()) << m;
    EXPECT_TRUE(fs::exists(p(std::string("b/curve_") + m + ".csv")));
  }
  const std::string curve = slurp(p("b/curve.csv"));
  EXPECT_EQ(curve.rfind("method,offset_s,accuracy\n", 0), 0u);
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 1 + 5 * 360);
  EXPECT_TRUE(fs::exists(p("b/report.json")));
  EXPECT_TRUE(fs::exists(p("b/report.txt")));
}

TEST_F(Cli, EvalVariantsSuite) {
  ASSERT_EQ(gen("data").code, 0);
  const CliRun r = run({"eval", "--suite", "variants", "--train", p("data/train"), "--test", p("data/test"), "--variants",
                     "lstm_buff,enhanced", "--epochs", "1", "--window-stride", "40", "--out",
                     p("ev")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(p("ev/summary.json")));
  EXPECT_EQ(summary.at("suite"), "variants");
  for (const char* m : {"lstm_buff", "enhanced", "gaze"}) EXPECT_TRUE(summary.at("methods").contains(m)) << m;
}

TEST_F(Cli, CorrelateAndFeatures) {
  ASSERT_EQ(gen("data").code, 0);
  ASSERT_EQ(run({"correlate", "--data", p("data/train"), "--out", p("c")}).code, 0);
  const std::string corr = slurp(p("c/correlation.csv"));
  EXPECT_EQ(std::count(corr.begin(), corr.end(), '\n'), 17);
  ASSERT_EQ(run({"features", "--data", p("data/train"), "--segment", "0", "--channels", "gaze,hand_euc", "--out",
                 p("f")})
                .code,
            0);
  EXPECT_EQ(slurp(p("f/features.csv")).rfind("t,goal_id,gaze,hand_euc\n", 0), 0u);
}

TEST_F(Cli, MissingRequiredFlagIsUsage) {
  const CliRun r = run({"train"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("goalpred: error[usage]:", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, UnknownFlagIsUsage) { EXPECT_EQ(run({"baselines", "--data", "x", "--bogus", "1"}).code, 2); }

TEST_F(Cli, UnknownSuiteIsUsage) { EXPECT_EQ(run({"eval", "--suite", "fig9", "--test", "x"}).code, 2); }

TEST_F(Cli, MissingFileIsIo) {
  const CliRun r = run({"baselines", "--data", p("nope"), "--out", p("b")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("goalpred: error[io]:", 0), 0u) << r.err;
}

TEST_F(Cli, MalformedFileIsParse) {
  std::ofstream(p("bad")) << "{\"format\": \"nonsense\"}\n";
  EXPECT_EQ(run({"baselines", "--data", p("bad"), "--out", p("b")}).code, 4);
}

TEST_F(Cli, EveryFlagIsDocumentedInHelp) {
  for (const std::string& sub : subcommand_names()) {
    const std::string help = subcommand_help(sub);
    const auto flags = subcommand_flags(sub);
    EXPECT_FALSE(flags.empty()) << sub;
    for (const std::string& f : flags) EXPECT_NE(help.find(f), std::string::npos) << sub << " " << f;
    const CliRun r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("Exit codes"), std::string::npos) << sub;
  }
}

}  // namespace
}  // namespace goalpred
