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

#ifndef TALKGAMES_TRAINING_ROLLOUT_H_
#define TALKGAMES_TRAINING_ROLLOUT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "talkgames/agents/remote.h"
#include "talkgames/agents/template_policy.h"
#include "talkgames/dialogue/episode.h"
#include "talkgames/signals/signals.h"
#include "talkgames/training/losses.h"

namespace talkgames::training {

class NoBranchPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class JudgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RewardShapingConfig {
  double lo_weight = 10.0;
  double ise_weight = 0.0;
  double naturalness_weight = 0.1;
  double naturalness_threshold = 0.7;

  static RewardShapingConfig Unshaped();
  bool needs_signals() const { return lo_weight != 0.0 || ise_weight != 0.0; }
  void Validate() const;
};

struct RewardBreakdown {
  double utility = 0.0;
  double lo = 0.0;
  double ise = 0.0;
  std::optional<double> natural_fraction;
  double naturalness_bonus = 0.0;
  double total = 0.0;
};

// r = u + lo_weight * LO + ise_weight * ISE
//       + naturalness_weight * [natural_fraction >= threshold].
// A missing report or fraction contributes nothing.
RewardBreakdown ShapedReward(double utility, const std::optional<signals::SignalReport>& report,
                             std::optional<double> natural_fraction,
                             const RewardShapingConfig& config);

// Signals at the state before `trained`'s last game action, or nullopt for
// games without behavioural signals.
std::optional<signals::ScheduledSignal> FinalActionSignals(const dialogue::Episode& episode,
                                                           int trained,
                                                           agents::AgentPolicy& trained_agent,
                                                           agents::AgentPolicy& opponent);

// Judge prompt for a batch of talk texts.
std::string RenderJudgePrompt(std::span<const std::string> texts,
                              const dialogue::TemplateLibrary& templates);
// One verdict per response in order; missing or unreadable verdicts are No.
std::vector<bool> ParseJudgeVerdicts(const std::string& reply, std::size_t n);

// Offline stand-in for a judge model: a reply counts as natural when it has
// at least three words, contains letters and is not dominated by one
// repeated word.
bool LooksNatural(const std::string& text);
class HeuristicJudge : public agents::ChatBackend {
 public:
  // Answers a judge prompt produced by RenderJudgePrompt.
  std::string Complete(const std::vector<dialogue::Message>& messages) override;
};

// Yes-fraction of `texts` (0 for an empty batch). Throws JudgeError when the
// backend fails.
double NaturalnessFraction(std::span<const std::string> texts, agents::ChatBackend& judge,
                           const dialogue::TemplateLibrary& templates);

// Non-empty talk texts of `player` in an episode.
std::vector<std::string> TalkTexts(const dialogue::Episode& episode, int player);

enum class BranchSelector { kFirst, kUniform, kLast };
BranchSelector ParseBranchSelector(const std::string& name);
std::string BranchSelectorName(BranchSelector selector);

struct RolloutSetup {
  game::GameSpec spec;
  agents::TemplatePolicy* trained = nullptr;
  agents::AgentPolicy* opponent = nullptr;
  int trained_player = 1;
  // Parameters of the reference policy for KL and DPO.
  std::span<const double> ref_params;
  RewardShapingConfig shaping;
  // Optional; naturalness is skipped without one.
  agents::ChatBackend* judge = nullptr;
  dialogue::EpisodeOptions episode_options;
  std::function<void(const std::string&)> warn;

  std::array<agents::AgentPolicy*, 2> seats() const;
};

// Final score of a finished episode for the trained player.
RewardBreakdown ScoreEpisode(const RolloutSetup& setup, const dialogue::Episode& episode);

struct RolloutGroup {
  std::string root_id;
  std::uint64_t root_seed = 0;
  int branch_turn = 0;
  // Trained player's view at the branch point.
  std::vector<dialogue::Message> context;
  std::vector<Completion> completions;
  // Serialized branch-point turn of each completion.
  std::vector<std::string> texts;
  std::vector<RewardBreakdown> rewards;
  std::vector<dialogue::Episode> episodes;
};

// Plays a root conversation, picks one of the trained player's turns with
// `selector`, forks k branches just before it and plays every branch to the
// end. Completion i is branch i's turn at the branch point, scored with the
// shaped reward of branch i. Throws NoBranchPoint.
RolloutGroup BranchAndRollout(const RolloutSetup& setup, int k, std::uint64_t seed,
                              BranchSelector selector);

// Rollout log records and preference export.
nlohmann::json RolloutGroupToJson(const RolloutGroup& group);
struct LoggedGroup {
  std::string root_id;
  int branch_turn = 0;
  std::vector<dialogue::Message> context;
  std::vector<std::string> texts;
  std::vector<double> rewards;
};
LoggedGroup LoggedGroupFromJson(const nlohmann::json& j);

enum class ExportFormat { kDpo, kGrpo };
ExportFormat ParseExportFormat(const std::string& name);
// DPO: one {context, chosen, rejected, chosen_reward, rejected_reward} line
// per pair with differing rewards. GRPO: one {context, completions, rewards}
// line per group that has at least two distinct rewards. Returns lines
// written.
std::size_t ExportPreferences(std::span<const LoggedGroup> groups, ExportFormat format,
                              std::ostream& out);

}  // namespace talkgames::training

#endif  // TALKGAMES_TRAINING_ROLLOUT_H_
