// Copyright 2026 The Talkgames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "talkgames/cli/commands.h"
#include "test_util.h"

namespace talkgames::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result RunCli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("talkgames_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  fs::path path_;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

constexpr char kTinyRun[] =
    "[training]\nsteps = 2\ngroup_size = 3\nbatch_size = 2\neval_every = 1\n"
    "eval_episodes = 4\noptimizer = adam\nlr = 0.05\n";

TEST(ConfigTest, DumpParseRoundTrip) {
  RunConfig c;
  c.train.algo = training::Algo::kDpoPerm;
  c.train.game = game::GameSpec::Bertrand({"Luxury Face Creams", 70, 0.2, 300, 5});
  c.train.opponent = "titfortat";
  c.train.trained_player = 0;
  c.train.seed = 99;
  c.train.shaping.ise_weight = 1.5;
  c.remote.model = "some-model";
  const std::string text = DumpConfig(c);
  const RunConfig back = ParseConfig(text);
  EXPECT_EQ(DumpConfig(back), text);
  EXPECT_EQ(back.train.ToJson(), c.train.ToJson());
  EXPECT_NE(text.find("trained_player = 1"), std::string::npos);
  EXPECT_EQ(DumpConfig(ParseConfig(DumpConfig(RunConfig{}))), DumpConfig(RunConfig{}));
}

TEST(ConfigTest, OpponentFollowsGameUnlessNamed) {
  EXPECT_EQ(ParseConfig("[game]\nkind = bertrand\n").train.opponent, "titfortat");
  EXPECT_EQ(ParseConfig("[game]\nkind = bargaining\n").train.opponent, "concession:0.3");
  EXPECT_EQ(ParseConfig("").train.opponent, training::TrainRunConfig{}.opponent);
  EXPECT_EQ(ParseConfig("[game]\nkind = bertrand\n[agents]\nopponent = biased_rps:1,0,0\n")
                .train.opponent,
            "biased_rps:1,0,0");
}

TEST(ConfigTest, Errors) {
  EXPECT_THROW(ParseConfig("[training]\nwarmup = 3\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[poker]\nsteps = 3\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[training]\nsteps = many\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[agents]\ntrained_player = 3\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[game]\nkind = chess\n"), ConfigError);
  const RunConfig c = ParseConfig("[game]\nkind = bargaining\nvalue = 300\n");
  EXPECT_EQ(c.train.game.kind, game::GameKind::kBargaining);
  EXPECT_EQ(c.train.game.bargaining.value, 300.0);
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli({}).code, kExitUsage);
  EXPECT_EQ(RunCli({"fly"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"train"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"eval", "--episodes", "-3"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"play", "--game", "rps", "--human-side", "3"}).code, kExitUsage);
  EXPECT_EQ(RunCli({"--help"}).code, kExitOk);
}

TEST(CliTest, UnknownConfigKeyExitsTwo) {
  TempDir dir("badkey");
  WriteText(dir / "run.ini", "[training]\nsteps = 1\nmomentum = 0.9\n");
  const Result r = RunCli({"train", "--config", dir / "run.ini", "--out", dir / "run"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("momentum"), std::string::npos);
}

TEST(CliTest, TrainIsDeterministicAndWritesRunDirectory) {
  TempDir dir("train");
  WriteText(dir / "run.ini", kTinyRun);
  const Result a = RunCli({"train", "--config", dir / "run.ini", "--seed", "5", "--out", dir / "a"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const Result b = RunCli({"train", "--config", dir / "run.ini", "--seed", "5", "--out", dir / "b"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  for (const char* f : {"config.ini", "metrics.csv", "episodes.jsonl", "rollouts.jsonl",
                        "manifest.json", "checkpoints/final.bin", "checkpoints/final.json",
                        "checkpoints/step-000000.bin"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("a/") + f))) << f;
  }
  const std::string metrics = testing::ReadFile(dir / "a/metrics.csv");
  EXPECT_EQ(metrics, testing::ReadFile(dir / "b/metrics.csv"));
  EXPECT_EQ(testing::ReadFile(dir / "a/checkpoints/final.bin"),
            testing::ReadFile(dir / "b/checkpoints/final.bin"));
  // Header plus evaluations at steps 0, 1 and 2.
  EXPECT_EQ(testing::ReadLines(dir / "a/metrics.csv").size(), 4u);

  const auto manifest = nlohmann::json::parse(testing::ReadFile(dir / "a/manifest.json"));
  EXPECT_EQ(manifest.at("seed"), 5);
  EXPECT_EQ(manifest.at("steps_completed"), 2);

  const Result c = RunCli({"train", "--config", dir / "run.ini", "--seed", "6", "--out", dir / "c"});
  ASSERT_EQ(c.code, kExitOk);
  EXPECT_NE(testing::ReadFile(dir / "c/metrics.csv"), metrics);
}

TEST(CliTest, EvalSignalsAndExportPipeline) {
  TempDir dir("pipeline");
  WriteText(dir / "run.ini", kTinyRun);
  ASSERT_EQ(RunCli({"train", "--config", dir / "run.ini", "--out", dir / "run"}).code, kExitOk);

  const Result eval = RunCli({"eval", "--checkpoint", dir / "run/checkpoints/final", "--episodes",
                              "5", "--csv", dir / "eval.csv", "--log", dir / "eval.jsonl"});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_NE(eval.out.find("win"), std::string::npos);
  EXPECT_EQ(testing::ReadLines(dir / "eval.jsonl").size(), 5u);
  EXPECT_EQ(testing::ReadLines(dir / "eval.csv").size(), 2u);

  const Result sig = RunCli({"signals", "--log", dir / "run/episodes.jsonl"});
  ASSERT_EQ(sig.code, kExitOk) << sig.err;
  EXPECT_EQ(sig.out.substr(0, sig.out.find('\n')),
            "episode_id,turn,ise,srp,lo,bound_lower,e_true,bound_upper,violation_flag");
  EXPECT_EQ(sig.out.find(",1\n"), std::string::npos);  // no violations

  const Result dpo = RunCli({"export", "--log", dir / "run/rollouts.jsonl", "--format", "dpo",
                             "--out", dir / "pairs.jsonl"});
  ASSERT_EQ(dpo.code, kExitOk) << dpo.err;
  for (const auto& line : testing::ReadLines(dir / "pairs.jsonl")) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("context") && j.contains("chosen") && j.contains("rejected"));
  }
  EXPECT_EQ(RunCli({"export", "--log", dir / "run/rollouts.jsonl", "--format", "kto"}).code,
            kExitUsage);
}

TEST(CliTest, EvalEdgeCases) {
  const Result zero = RunCli({"eval", "--game", "rps", "--episodes", "0"});
  EXPECT_EQ(zero.code, kExitOk) << zero.err;
  // Without an explicit opponent each game gets its own scripted default.
  for (const char* game : {"bertrand", "bargaining"}) {
    const Result r = RunCli({"eval", "--game", game, "--episodes", "2"});
    EXPECT_EQ(r.code, kExitOk) << game << ": " << r.err;
  }
  EXPECT_EQ(RunCli({"eval", "--game", "bertrand", "--opponent", "biased_rps:0.5,0.25,0.25",
                    "--episodes", "1"})
                .code,
            kExitUsage);
  EXPECT_EQ(RunCli({"eval", "--checkpoint", "/nonexistent/ckpt"}).code, kExitRuntime);

  TempDir dir("mismatch");
  WriteText(dir / "run.ini", kTinyRun);
  ASSERT_EQ(RunCli({"train", "--config", dir / "run.ini", "--out", dir / "run"}).code, kExitOk);
  const Result wrong = RunCli(
      {"eval", "--checkpoint", dir / "run/checkpoints/final", "--game", "bertrand", "--episodes", "1"});
  EXPECT_EQ(wrong.code, kExitUsage);
  EXPECT_NE(wrong.err.find("trained on rps"), std::string::npos) << wrong.err;
}

TEST(CliTest, SignalsErrors) {
  TempDir dir("signals");
  EXPECT_NE(RunCli({"signals", "--log", dir / "missing.jsonl"}).code, kExitOk);
  // An episode log without stored signals needs a live opponent.
  ASSERT_EQ(RunCli({"eval", "--game", "rps", "--episodes", "2", "--log", dir / "plain.jsonl"}).code,
            kExitOk);
  auto lines = testing::ReadLines(dir / "plain.jsonl");
  std::ofstream stripped(dir / "stripped.jsonl");
  for (const auto& line : lines) {
    auto j = nlohmann::json::parse(line);
    j["extra"].erase("signals");
    stripped << j.dump() << "\n";
  }
  stripped.close();
  EXPECT_EQ(RunCli({"signals", "--log", dir / "stripped.jsonl"}).code, kExitUsage);
  const Result live = RunCli({"signals", "--log", dir / "stripped.jsonl", "--opponent",
                              "biased_rps:0.5,0.25,0.25"});
  EXPECT_EQ(live.code, kExitOk) << live.err;
  EXPECT_EQ(std::count(live.out.begin(), live.out.end(), '\n'), 3);
}

TEST(CliTest, ExportEmptyLogWritesNothing) {
  TempDir dir("export");
  WriteText(dir / "empty.jsonl", "");
  const Result r = RunCli({"export", "--log", dir / "empty.jsonl", "--format", "grpo"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliTest, PlayAgainstScriptedAgent) {
  const Result r = RunCli({"play", "--game", "rps", "--seed", "1"},
                          "talk: hello there | play: paper\n");
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_FALSE(r.out.empty());

  const Result reprompt =
      RunCli({"play", "--game", "rps", "--seed", "1"}, "not a move\ntalk: hi | play: rock\n");
  EXPECT_EQ(reprompt.code, kExitOk);

  const Result closed = RunCli({"play", "--game", "bertrand", "--seed", "1"}, "");
  EXPECT_EQ(closed.code, kExitOk);
  EXPECT_NE((closed.out + closed.err).find("input closed"), std::string::npos);
}

}  // namespace
}  // namespace talkgames::cli
