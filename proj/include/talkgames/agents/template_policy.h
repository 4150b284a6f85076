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

#ifndef TALKGAMES_AGENTS_TEMPLATE_POLICY_H_
#define TALKGAMES_AGENTS_TEMPLATE_POLICY_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/agents/policy.h"
#include "talkgames/agents/softmax_model.h"
#include "talkgames/dialogue/turn.h"

namespace talkgames::agents {

// A recorded turn that no template path can produce.
class SupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trainable agent that speaks through fixed per-game template sets. A turn
// is produced by a chain of softmax choices (reasoning text, talk-or-play for
// RPS, talk text, game action), each linear in one-hot features of the
// conversation state, so every turn has an exact log-probability.
//
// Feature layout (25 one-hot slots): bias, phase (3), own turn index (5),
// category of the opponent's latest talk (6), category of own latest talk
// (6), latest revealed opponent behaviour (4).
//
// A separate belief head predicts the opponent's next game action; it is
// used for elicitation only and is not touched by the game losses.
class TemplatePolicy : public AgentPolicy {
 public:
  static constexpr int kNumFeatures = 25;

  explicit TemplatePolicy(game::GameKind kind, std::string name = "template");

  std::string name() const override { return name_; }
  bool trainable() const override { return true; }
  bool has_exact_logprobs() const override { return true; }

  game::GameKind kind() const { return kind_; }
  const SoftmaxModel& model() const { return model_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Stage indices; kNoStage where a game has no such stage.
  static constexpr int kNoStage = -1;
  int think_stage() const { return 0; }
  int mode_stage() const { return mode_stage_; }
  int talk_stage() const { return talk_stage_; }
  int play_stage() const { return play_stage_; }
  int belief_stage() const { return belief_stage_; }

  struct Sampled {
    dialogue::TurnContent content;
    std::vector<Decision> decisions;
  };
  Sampled Sample(const dialogue::Conversation& conversation, int player,
                 util::Rng& rng) const;

  ActResult Act(const dialogue::Conversation& conversation, int player,
                util::Rng& rng) override;
  Distribution ElicitProbs(const dialogue::Conversation& conversation, int player,
                           const std::vector<game::Action>& candidates,
                           ElicitTarget target) override;

  // Decisions that produce `turn` from the state `before` (which must be the
  // conversation just before the turn). Uses the recorded trace when present,
  // otherwise inverts the texts. Throws SupportError.
  std::vector<Decision> DecisionsFor(const dialogue::Conversation& before,
                                     const dialogue::Turn& turn) const;

  FeatureVector Features(const dialogue::Conversation& conversation, int player) const;

  // Texts and action emitters of this game.
  const std::vector<std::string>& think_texts() const { return think_texts_; }
  const std::vector<std::string>& talk_texts() const { return talk_texts_; }
  // Game action of play choice `c` for `player` at this state.
  game::Action Emit(const dialogue::Conversation& conversation, int player, int c) const;
  int num_emitters() const;

 private:
  Decision MakeDecision(int stage, const FeatureVector& x, std::vector<char> legal) const;
  std::vector<char> PlayMask(const dialogue::Conversation& conversation, int player) const;
  int TalkCategory(const std::string& text) const;

  game::GameKind kind_;
  std::string name_;
  SoftmaxModel model_;
  std::vector<double> params_;
  std::vector<std::string> think_texts_;
  std::vector<std::string> talk_texts_;
  int mode_stage_ = kNoStage;
  int talk_stage_ = kNoStage;
  int play_stage_ = kNoStage;
  int belief_stage_ = kNoStage;
};

}  // namespace talkgames::agents

#endif  // TALKGAMES_AGENTS_TEMPLATE_POLICY_H_
