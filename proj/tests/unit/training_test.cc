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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "gtest/gtest.h"
#include "talkgames/agents/scripted.h"
#include "talkgames/agents/template_policy.h"
#include "talkgames/dialogue/templates.h"
#include "talkgames/training/optimizer.h"
#include "talkgames/training/rollout.h"
#include "talkgames/training/trainer.h"
#include "test_util.h"

namespace talkgames::training {
namespace {

using agents::TemplatePolicy;

TEST(OptimizerTest, SgdStep) {
  Optimizer opt({OptimizerKind::kSgd, 0.1}, 1);
  std::vector<double> theta = {0.0};
  opt.Step(theta, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(theta[0], -0.1);
  opt.Step(theta, std::vector<double>{0.0});
  EXPECT_DOUBLE_EQ(theta[0], -0.1);
}

TEST(OptimizerTest, AdamZeroGradientLeavesThetaUnchanged) {
  Optimizer opt({OptimizerKind::kAdam, 1e-3}, 2);
  std::vector<double> theta = {0.3, -0.7};
  opt.Step(theta, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(theta, (std::vector<double>{0.3, -0.7}));
}

TEST(OptimizerTest, AdamFirstStepIsLearningRate) {
  for (double scale : {1e-3, 1.0, 1e3}) {
    Optimizer opt({OptimizerKind::kAdam, 1e-4}, 2);
    std::vector<double> theta = {0.0, 0.0};
    opt.Step(theta, std::vector<double>{scale, -scale});
    EXPECT_NEAR(theta[0], -1e-4, 1e-8) << scale;
    EXPECT_NEAR(theta[1], 1e-4, 1e-8) << scale;
  }
}

TEST(OptimizerTest, AdamMatchesReferenceArithmetic) {
  const OptimizerConfig cfg{OptimizerKind::kAdam, 0.01, 0.9, 0.999, 1e-8};
  Optimizer opt(cfg, 3);
  util::Rng rng(1);
  std::vector<double> theta = testing::RandomVector(rng, 3, 1.0);
  std::vector<double> mine = theta, m(3, 0.0), v(3, 0.0);
  for (int t = 1; t <= 10; ++t) {
    const auto g = testing::RandomVector(rng, 3, 2.0);
    opt.Step(theta, g);
    for (int i = 0; i < 3; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      mine[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(theta[i], mine[i], 1e-14);
  }
  EXPECT_EQ(opt.steps(), 10);
}

TEST(OptimizerTest, NonFiniteGradientAbortsStep) {
  Optimizer opt({OptimizerKind::kAdam, 0.01}, 2);
  std::vector<double> theta = {1.0, 2.0};
  opt.Step(theta, std::vector<double>{0.5, 0.5});
  const auto before = theta;
  const auto state = opt.StateToJson();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(opt.Step(theta, std::vector<double>{nan, 0.0}), NonFiniteGradient);
  EXPECT_THROW(opt.Step(theta, std::vector<double>{0.0, INFINITY}), NonFiniteGradient);
  EXPECT_EQ(theta, before);
  EXPECT_EQ(opt.StateToJson(), state);
}

TEST(OptimizerTest, StateRoundTripContinuesIdentically) {
  Optimizer a({OptimizerKind::kAdam, 0.01}, 4);
  util::Rng rng(2);
  std::vector<double> theta = testing::RandomVector(rng, 4, 1.0);
  for (int t = 0; t < 3; ++t) a.Step(theta, testing::RandomVector(rng, 4, 1.0));
  Optimizer b({OptimizerKind::kAdam, 0.01}, 4);
  b.RestoreState(nlohmann::json::parse(a.StateToJson().dump()));
  std::vector<double> theta_b = theta;
  for (int t = 0; t < 3; ++t) {
    const auto g = testing::RandomVector(rng, 4, 1.0);
    a.Step(theta, g);
    b.Step(theta_b, g);
  }
  EXPECT_EQ(theta, theta_b);
  EXPECT_EQ(ParseOptimizerKind("adam"), OptimizerKind::kAdam);
  EXPECT_THROW(ParseOptimizerKind("rmsprop"), std::invalid_argument);
}

TEST(ShapedRewardTest, Components) {
  signals::SignalReport report;
  report.lo = 1.25;
  report.ise = -0.3;
  const RewardShapingConfig shaped;
  const RewardBreakdown r = ShapedReward(2.0, report, 0.8, shaped);
  EXPECT_DOUBLE_EQ(r.total, 14.6);
  EXPECT_DOUBLE_EQ(r.naturalness_bonus, 0.1);
  EXPECT_DOUBLE_EQ(ShapedReward(2.0, report, 0.6, shaped).total, 14.5);
  EXPECT_DOUBLE_EQ(ShapedReward(2.0, report, 0.7, shaped).total, 14.6);
  EXPECT_DOUBLE_EQ(ShapedReward(2.0, std::nullopt, std::nullopt, shaped).total, 2.0);

  RewardShapingConfig with_ise;
  with_ise.ise_weight = 2.0;
  EXPECT_DOUBLE_EQ(ShapedReward(1.0, report, std::nullopt, with_ise).total, 1.0 + 12.5 - 0.6);
  EXPECT_DOUBLE_EQ(ShapedReward(1.0, report, 1.0, RewardShapingConfig::Unshaped()).total, 1.0);
  EXPECT_FALSE(RewardShapingConfig::Unshaped().needs_signals());
}

TEST(JudgeTest, ParseVerdicts) {
  const auto v = ParseJudgeVerdicts(
      "Response 1\nNaturalness score: Yes\nResponse 2\nnaturalness score:no\n"
      "Response 3\nNaturalness Score: YES\n",
      4);
  EXPECT_EQ(v, (std::vector<bool>{true, false, true, false}));
  EXPECT_EQ(ParseJudgeVerdicts("I cannot judge this.", 2), (std::vector<bool>{false, false}));
}

TEST(JudgeTest, HeuristicJudgeFraction) {
  EXPECT_TRUE(LooksNatural("I think I will play rock this time."));
  EXPECT_FALSE(LooksNatural("ok"));
  EXPECT_FALSE(LooksNatural("123 456 789"));
  EXPECT_FALSE(LooksNatural("rock rock rock rock paper"));
  HeuristicJudge judge;
  const auto& templates = dialogue::TemplateLibrary::Builtin();
  const std::vector<std::string> texts = {"Let us both keep prices high.", "zz",
                                          "Paper beats rock, you know.", "go go go go"};
  EXPECT_DOUBLE_EQ(NaturalnessFraction(texts, judge, templates), 0.5);
  EXPECT_DOUBLE_EQ(NaturalnessFraction({}, judge, templates), 0.0);
}

class FailingJudge : public agents::ChatBackend {
 public:
  std::string Complete(const std::vector<dialogue::Message>&) override {
    throw agents::ChatError("offline");
  }
};

TEST(JudgeTest, BackendFailureRaisesJudgeError) {
  FailingJudge judge;
  const std::vector<std::string> texts = {"hello there friend"};
  EXPECT_THROW(NaturalnessFraction(texts, judge, dialogue::TemplateLibrary::Builtin()),
               JudgeError);
}

struct RpsFixture {
  TemplatePolicy policy{game::GameKind::kRps};
  std::unique_ptr<agents::AgentPolicy> opponent =
      agents::MakeScriptedAgent("biased_rps:0.5,0.25,0.25");
  HeuristicJudge judge;

  RolloutSetup Setup() {
    RolloutSetup s;
    s.spec = game::GameSpec::Rps();
    s.trained = &policy;
    s.opponent = opponent.get();
    s.trained_player = 1;
    s.ref_params = policy.params();
    s.judge = &judge;
    return s;
  }
};

TEST(RolloutTest, BranchesShareThePrefix) {
  RpsFixture fx;
  const RolloutSetup setup = fx.Setup();
  for (auto selector : {BranchSelector::kFirst, BranchSelector::kUniform, BranchSelector::kLast}) {
    const RolloutGroup g = BranchAndRollout(setup, 8, 17, selector);
    ASSERT_EQ(g.completions.size(), 8u);
    ASSERT_EQ(g.episodes.size(), 8u);
    const auto& first = g.episodes[0].turns;
    for (const auto& e : g.episodes) {
      ASSERT_GT(e.turns.size(), static_cast<std::size_t>(g.branch_turn));
      EXPECT_EQ(e.turns[g.branch_turn].player, 1);
      for (int t = 0; t < g.branch_turn; ++t) {
        EXPECT_EQ(dialogue::SerializeTurn(e.turns[t].content()),
                  dialogue::SerializeTurn(first[t].content()));
      }
    }
    for (std::size_t i = 0; i < 8; ++i) {
      const auto& c = g.completions[i];
      EXPECT_NEAR(*c.logprob_old, fx.policy.model().SequenceLogProb(fx.policy.params(), c.decisions),
                  1e-12);
      EXPECT_DOUBLE_EQ(c.reward, g.rewards[i].total);
      EXPECT_DOUBLE_EQ(c.reward, ScoreEpisode(setup, g.episodes[i]).total);
    }
  }
}

TEST(RolloutTest, RewardsVaryAcrossBranches) {
  RpsFixture fx;
  const RolloutSetup setup = fx.Setup();
  int varied = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RolloutGroup g = BranchAndRollout(setup, 8, seed, BranchSelector::kUniform);
    double lo = g.completions[0].reward, hi = lo;
    for (const auto& c : g.completions) {
      lo = std::min(lo, c.reward);
      hi = std::max(hi, c.reward);
    }
    varied += hi > lo;
  }
  EXPECT_GE(varied, 15);
}

TEST(RolloutTest, ShapedScoreUsesFinalActionSignals) {
  RpsFixture fx;
  RolloutSetup setup = fx.Setup();
  const auto e = dialogue::RunEpisode(setup.spec, *fx.opponent, fx.policy, 4);
  const auto signals = FinalActionSignals(e, 1, fx.policy, *fx.opponent);
  ASSERT_TRUE(signals.has_value());
  EXPECT_DOUBLE_EQ(signals->report.lo, 1.25);
  const RewardBreakdown r = ScoreEpisode(setup, e);
  EXPECT_DOUBLE_EQ(r.utility, e.utilities[1]);
  EXPECT_DOUBLE_EQ(r.lo, 1.25);
  EXPECT_DOUBLE_EQ(r.total, r.utility + 12.5 + r.naturalness_bonus);
}

TEST(RolloutTest, JsonAndExport) {
  RpsFixture fx;
  const RolloutSetup setup = fx.Setup();
  std::vector<LoggedGroup> logged;
  std::size_t expected_pairs = 0, expected_groups = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RolloutGroup g = BranchAndRollout(setup, 4, seed, BranchSelector::kUniform);
    logged.push_back(LoggedGroupFromJson(nlohmann::json::parse(RolloutGroupToJson(g).dump())));
    EXPECT_EQ(logged.back().texts, g.texts);
    EXPECT_EQ(logged.back().branch_turn, g.branch_turn);
    bool distinct = false;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_DOUBLE_EQ(logged.back().rewards[i], g.completions[i].reward);
      for (std::size_t j = i + 1; j < 4; ++j) {
        if (g.completions[i].reward != g.completions[j].reward) {
          ++expected_pairs;
          distinct = true;
        }
      }
    }
    expected_groups += distinct;
  }
  std::ostringstream dpo, grpo;
  EXPECT_EQ(ExportPreferences(logged, ExportFormat::kDpo, dpo), expected_pairs);
  EXPECT_EQ(ExportPreferences(logged, ExportFormat::kGrpo, grpo), expected_groups);
  std::istringstream lines(dpo.str());
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_GT(j.at("chosen_reward").get<double>(), j.at("rejected_reward").get<double>());
  }
  EXPECT_THROW(ParseExportFormat("csv"), std::invalid_argument);
}

TEST(RolloutTest, BertrandAndBargainingGroups) {
  for (auto kind : {game::GameKind::kBertrand, game::GameKind::kBargaining}) {
    TemplatePolicy policy(kind);
    auto opp = agents::MakeScriptedAgent(kind == game::GameKind::kBertrand ? "titfortat"
                                                                           : "concession:0.3");
    RolloutSetup s;
    s.spec = kind == game::GameKind::kBertrand ? game::GameSpec::Bertrand({})
                                               : game::GameSpec::Bargaining({});
    s.trained = &policy;
    s.opponent = opp.get();
    s.ref_params = policy.params();
    const RolloutGroup g = BranchAndRollout(s, 4, 3, BranchSelector::kUniform);
    EXPECT_EQ(g.completions.size(), 4u);
    for (const auto& r : g.rewards) {
      if (kind == game::GameKind::kBargaining) EXPECT_EQ(r.lo, 0.0);
    }
  }
}

TEST(StarTest, ThresholdAndSelection) {
  EXPECT_DOUBLE_EQ(StarThreshold({2, 2, 1, 0}, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(StarThreshold({0, 1, 2, 3, 4}, 0.25), 3.0);
  EXPECT_DOUBLE_EQ(StarThreshold({5}, 0.25), 5.0);

  TemplatePolicy policy(game::GameKind::kRps);
  auto opp = agents::MakeScriptedAgent("biased_rps:0.5,0.25,0.25");
  std::vector<dialogue::Episode> episodes;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    episodes.push_back(dialogue::RunEpisode(game::GameSpec::Rps(), *opp, policy, seed));
  }
  const std::vector<double> rewards = {2, 2, 1, 0};
  const auto kept = StarSelect(episodes, rewards, 0.5, policy, 1);
  std::size_t expected = 0;
  for (int e = 0; e < 2; ++e) {
    for (const auto& t : episodes[e].turns) expected += t.player == 1;
  }
  EXPECT_LE(kept.size(), expected);
  EXPECT_GE(kept.size(), 1u);

  // Forced turns never become imitation targets.
  for (auto& e : episodes) {
    for (auto& t : e.turns) t.forced = t.forced || t.player == 1;
  }
  EXPECT_TRUE(StarSelect(episodes, rewards, 0.5, policy, 1).empty());
}

TrainRunConfig SmallConfig(Algo algo) {
  TrainRunConfig c;
  c.algo = algo;
  c.steps = 3;
  c.group_size = 4;
  c.batch_size = 2;
  c.eval_every = 2;
  c.eval_episodes = 6;
  c.seed = 12;
  c.optimizer = {OptimizerKind::kAdam, 0.05};
  return c;
}

std::vector<double> TrainParams(const TrainRunConfig& config, int steps) {
  TemplatePolicy policy(config.game.kind);
  auto opp = agents::MakeScriptedAgent(config.opponent);
  HeuristicJudge judge;
  Trainer trainer(config, policy, *opp, &judge);
  for (int i = 0; i < steps; ++i) trainer.Step();
  return policy.params();
}

TEST(TrainerTest, EveryAlgorithmUpdatesDeterministically) {
  for (Algo algo : {Algo::kGrpo, Algo::kDpoPairs, Algo::kDpoPerm, Algo::kDpoTies, Algo::kStar}) {
    const TrainRunConfig config = SmallConfig(algo);
    const auto a = TrainParams(config, 2);
    const auto b = TrainParams(config, 2);
    EXPECT_EQ(a, b) << AlgoName(algo);
    EXPECT_NE(a, TemplatePolicy(game::GameKind::kRps).params()) << AlgoName(algo);
  }
}

TEST(TrainerTest, RunEmitsMetricsOnSchedule) {
  const TrainRunConfig config = SmallConfig(Algo::kGrpo);
  TemplatePolicy policy(game::GameKind::kRps);
  auto opp = agents::MakeScriptedAgent(config.opponent);
  Trainer trainer(config, policy, *opp);
  std::vector<int> eval_steps;
  int steps = 0;
  Trainer::Callbacks cb;
  cb.on_metrics = [&](const MetricsRow& row) {
    eval_steps.push_back(row.step);
    EXPECT_EQ(row.eval.episodes, 6);
    EXPECT_NEAR(*row.eval.win + *row.eval.draw + *row.eval.lose, 1.0, 1e-12);
  };
  cb.on_step = [&](const StepResult&) { ++steps; };
  trainer.Run(cb);
  EXPECT_EQ(steps, 3);
  EXPECT_EQ(eval_steps, (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(trainer.step(), 3);
}

TEST(TrainerTest, ResumeMatchesUninterruptedRun) {
  const TrainRunConfig config = SmallConfig(Algo::kGrpo);
  const auto straight = TrainParams(config, 4);

  const auto dir = std::filesystem::temp_directory_path() / "talkgames_resume_test";
  std::filesystem::create_directories(dir);
  const std::string base = (dir / "ckpt").string();
  {
    TemplatePolicy policy(game::GameKind::kRps);
    auto opp = agents::MakeScriptedAgent(config.opponent);
    HeuristicJudge judge;
    Trainer trainer(config, policy, *opp, &judge);
    trainer.Step();
    trainer.Step();
    SaveCheckpoint(base, policy.params(), trainer.CheckpointMetadata());
  }
  TemplatePolicy policy(game::GameKind::kRps);
  auto opp = agents::MakeScriptedAgent(config.opponent);
  HeuristicJudge judge;
  Trainer trainer(config, policy, *opp, &judge);
  const Checkpoint ckpt = LoadCheckpoint(base + ".json");
  policy.params() = ckpt.params;
  trainer.Resume(ckpt.metadata);
  EXPECT_EQ(trainer.step(), 2);
  trainer.Step();
  trainer.Step();
  EXPECT_EQ(policy.params(), straight);
  std::filesystem::remove_all(dir);
}

TEST(TrainerTest, AccumulatedGradientMatchesBatched) {
  RpsFixture fx;
  util::Rng rng(21);
  for (double& p : fx.policy.params()) p = 0.3 * (2.0 * rng.Uniform01() - 1.0);
  const auto ref = testing::RandomVector(rng, fx.policy.params().size(), 0.3);
  RolloutSetup setup = fx.Setup();
  setup.ref_params = ref;
  std::vector<std::vector<Completion>> groups;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    groups.push_back(BranchAndRollout(setup, 8, seed, BranchSelector::kUniform).completions);
  }
  GrpoConfig grpo;
  grpo.entropy_gamma = 0.01;
  const auto& model = fx.policy.model();
  const LossResult batched = BatchedGrpoLoss(model, fx.policy.params(), ref, groups, grpo);
  const LossResult accumulated =
      AccumulatedGrpoLoss(model, fx.policy.params(), ref, groups, grpo);
  EXPECT_NEAR(batched.loss, accumulated.loss, 1e-10);
  EXPECT_LT(testing::MaxRelativeError(batched.grad, accumulated.grad), 1e-10);
}

TEST(TrainerTest, ConfigJsonAndValidation) {
  TrainRunConfig c = SmallConfig(Algo::kDpoTies);
  c.game = game::GameSpec::Bertrand({});
  c.opponent = "titfortat";
  const TrainRunConfig back = TrainRunConfig::FromJson(nlohmann::json::parse(c.ToJson().dump()));
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_EQ(back.Hash(), c.Hash());
  TrainRunConfig other = c;
  other.seed = 13;
  EXPECT_NE(other.Hash(), c.Hash());

  TrainRunConfig bad = c;
  bad.group_size = 1;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = c;
  bad.steps = -1;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  EXPECT_EQ(ParseAlgo("dpo_perm"), Algo::kDpoPerm);
  EXPECT_THROW(ParseAlgo("ppo"), std::invalid_argument);

  TemplatePolicy wrong(game::GameKind::kRps);
  auto opp = agents::MakeScriptedAgent("titfortat");
  EXPECT_THROW(Trainer(c, wrong, *opp), std::invalid_argument);
}

TEST(CheckpointTest, BitExactRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "talkgames_ckpt_test";
  std::filesystem::create_directories(dir);
  const std::string base = (dir / "step").string();
  const std::vector<double> params = {0.0, -0.0, 1.0 / 3.0, -1e-300, 6.02e23,
                                      std::numeric_limits<double>::denorm_min()};
  SaveCheckpoint(base, params, {{"step", 7}});
  for (const std::string& path : {base, base + ".bin", base + ".json"}) {
    const Checkpoint c = LoadCheckpoint(path);
    ASSERT_EQ(c.params.size(), params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(c.params[i]), std::bit_cast<std::uint64_t>(params[i]));
    }
    EXPECT_EQ(c.metadata.at("step"), 7);
  }
  EXPECT_EQ(std::filesystem::file_size(base + ".bin"), params.size() * 8);
  EXPECT_THROW(LoadCheckpoint((dir / "missing").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(EvaluateTest, SummariesPerGame) {
  TemplatePolicy rps(game::GameKind::kRps);
  auto biased = agents::MakeScriptedAgent("biased_rps:0.5,0.25,0.25");
  std::vector<dialogue::Episode> episodes;
  const EvalSummary s = Evaluate(game::GameSpec::Rps(), rps, *biased, 1, 10, 3, nullptr, &episodes);
  EXPECT_EQ(s.episodes, 10);
  EXPECT_EQ(episodes.size(), 10u);
  ASSERT_TRUE(s.ise && s.srp && s.lo && s.win);
  EXPECT_LE(*s.ise, 0.0);
  EXPECT_FALSE(s.ne || s.bp);
  double reward = 0.0;
  for (const auto& e : episodes) reward += e.utilities[1];
  EXPECT_NEAR(s.reward_mean, reward / 10.0, 1e-12);

  TemplatePolicy firm(game::GameKind::kBertrand);
  auto tft = agents::MakeScriptedAgent("titfortat");
  const EvalSummary b = Evaluate(game::GameSpec::Bertrand({}), firm, *tft, 1, 3, 3);
  EXPECT_TRUE(b.ne.has_value());
  EXPECT_FALSE(b.win.has_value());

  TemplatePolicy trader(game::GameKind::kBargaining);
  auto seller = agents::MakeScriptedAgent("concession:0.3");
  const EvalSummary d = Evaluate(game::GameSpec::Bargaining({}), trader, *seller, 1, 3, 3);
  ASSERT_TRUE(d.bp.has_value());
  EXPECT_GE(*d.bp, 0.0);
  EXPECT_LE(*d.bp, 1.0);
  EXPECT_FALSE(d.ise || d.srp || d.lo);

  // Identical seeds give identical summaries.
  const EvalSummary again = Evaluate(game::GameSpec::Rps(), rps, *biased, 1, 10, 3);
  EXPECT_EQ(FormatMetricsRow({0, "grpo", "rps", again, std::nullopt}),
            FormatMetricsRow({0, "grpo", "rps", s, std::nullopt}));
}

TEST(MetricsTest, FormatDouble) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(std::stod(FormatDouble(1.0 / 3.0)), 1.0 / 3.0);
  const std::string header = MetricsHeader();
  EXPECT_EQ(header.substr(0, 4), "step");
}

}  // namespace
}  // namespace talkgames::training
