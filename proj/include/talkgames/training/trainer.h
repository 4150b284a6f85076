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

#ifndef TALKGAMES_TRAINING_TRAINER_H_
#define TALKGAMES_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "talkgames/agents/template_policy.h"
#include "talkgames/dialogue/episode.h"
#include "talkgames/training/losses.h"
#include "talkgames/training/optimizer.h"
#include "talkgames/training/rollout.h"

namespace talkgames::training {

enum class Algo { kGrpo, kDpoPairs, kDpoPerm, kDpoTies, kStar };
Algo ParseAlgo(const std::string& name);
std::string AlgoName(Algo algo);

struct TrainRunConfig {
  Algo algo = Algo::kGrpo;
  int steps = 3000;
  int group_size = 8;
  int batch_size = 8;
  int eval_every = 20;
  int eval_episodes = 32;
  std::uint64_t seed = 0;

  OptimizerConfig optimizer;
  GrpoConfig grpo;
  double dpo_beta = 0.1;
  std::size_t permutation_cap = 1000;
  double star_quantile = 0.25;
  RewardShapingConfig shaping;
  // "heuristic", "remote" or "none".
  std::string judge = "heuristic";

  game::GameSpec game = game::GameSpec::Rps();
  // Scripted agent spec or "remote".
  std::string opponent = "biased_rps:0.5,0.25,0.25";
  int trained_player = 1;
  BranchSelector selector = BranchSelector::kUniform;
  int max_resamples = 3;
  double trained_temperature = 1.0;
  double fixed_temperature = 0.6;

  // Throws std::invalid_argument.
  void Validate() const;
  nlohmann::json ToJson() const;
  static TrainRunConfig FromJson(const nlohmann::json& j);
  // Stable digest of ToJson().
  std::string Hash() const;
};

struct EvalSummary {
  int episodes = 0;
  double reward_mean = 0.0;
  double nra = 0.0;
  std::optional<double> ise, srp, lo;
  std::optional<double> win, draw, lose;
  std::optional<double> ne;
  std::optional<double> bp;
  std::optional<double> nat_fraction;
};

// Plays `n` fresh episodes with seeds derived from `seed` and summarizes
// them for `trained_player`. Episodes are appended to `out` when given.
EvalSummary Evaluate(const game::GameSpec& spec, agents::AgentPolicy& trained,
                     agents::AgentPolicy& opponent, int trained_player, int n,
                     std::uint64_t seed, agents::ChatBackend* judge = nullptr,
                     std::vector<dialogue::Episode>* out = nullptr,
                     const dialogue::EpisodeOptions& options = {});

struct MetricsRow {
  int step = 0;
  std::string algo;
  std::string game;
  EvalSummary eval;
  std::optional<double> loss;
};
std::string MetricsHeader();
std::string FormatMetricsRow(const MetricsRow& row);
// Shortest round-trip decimal form; used for every number in the CSV.
std::string FormatDouble(double value);

// Threshold reward: the (1 - quantile) quantile of `rewards` with linear
// interpolation between order statistics.
double StarThreshold(std::vector<double> rewards, double quantile);
// Decision sequences of the non-forced `trained_player` turns of every
// episode whose reward reaches the threshold, without exact duplicates.
std::vector<std::vector<agents::Decision>> StarSelect(
    const std::vector<dialogue::Episode>& episodes, const std::vector<double>& rewards,
    double quantile, const agents::TemplatePolicy& policy, int trained_player);

struct StepResult {
  double loss = 0.0;
  int groups_used = 0;
  bool updated = false;
  std::vector<RolloutGroup> groups;
  std::vector<dialogue::Episode> episodes;
};

// Owns the optimizer and reference parameters of one training run.
class Trainer {
 public:
  Trainer(TrainRunConfig config, agents::TemplatePolicy& policy, agents::AgentPolicy& opponent,
          agents::ChatBackend* judge = nullptr);

  const TrainRunConfig& config() const { return config_; }
  int step() const { return step_; }
  const std::vector<double>& reference() const { return reference_; }
  Optimizer& optimizer() { return optimizer_; }

  // Generates one batch, accumulates its gradient and applies an update.
  StepResult Step();
  // Metrics for the current parameters on the fixed evaluation seeds.
  MetricsRow EvaluateNow(std::optional<double> loss,
                         std::vector<dialogue::Episode>* episodes = nullptr);

  struct Callbacks {
    std::function<void(const MetricsRow&)> on_metrics;
    std::function<void(const StepResult&)> on_step;
    std::function<void(const std::vector<dialogue::Episode>&)> on_eval_episodes;
  };
  // Evaluates at step 0, every eval_every steps and after the last step.
  void Run(const Callbacks& callbacks);

  // Restores the step counter and optimizer state from a checkpoint sidecar.
  void Resume(const nlohmann::json& sidecar);
  nlohmann::json CheckpointMetadata() const;

  void set_warn(std::function<void(const std::string&)> warn) { warn_ = std::move(warn); }

 private:
  RolloutSetup Setup() const;
  double AccumulateGroup(const RolloutGroup& group, std::vector<double>& grad);

  TrainRunConfig config_;
  agents::TemplatePolicy& policy_;
  agents::AgentPolicy& opponent_;
  agents::ChatBackend* judge_;
  std::vector<double> reference_;
  Optimizer optimizer_;
  int step_ = 0;
  std::function<void(const std::string&)> warn_;
};

// Gradient of a batch of GRPO groups computed group by group (each group's
// full loss and gradient, then summed), for comparison with the per
// completion accumulation used in training.
LossResult BatchedGrpoLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                           std::span<const double> ref,
                           std::span<const std::vector<Completion>> groups,
                           const GrpoConfig& config);
// Same quantity, one completion at a time into a single buffer.
LossResult AccumulatedGrpoLoss(const agents::SoftmaxModel& model,
                               std::span<const double> theta, std::span<const double> ref,
                               std::span<const std::vector<Completion>> groups,
                               const GrpoConfig& config);

// Checkpoint files: `<base>.bin` holds the parameters as little-endian
// IEEE-754 doubles; `<base>.json` holds the metadata.
void SaveCheckpoint(const std::string& base, const std::vector<double>& params,
                    const nlohmann::json& metadata);
struct Checkpoint {
  std::vector<double> params;
  nlohmann::json metadata;
};
// Accepts the base path or either file name. Throws std::runtime_error.
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace talkgames::training

#endif  // TALKGAMES_TRAINING_TRAINER_H_
