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

#ifndef TALKGAMES_AGENTS_SCRIPTED_H_
#define TALKGAMES_AGENTS_SCRIPTED_H_

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "talkgames/agents/policy.h"

namespace talkgames::agents {

// Plays rock/paper/scissors with fixed probabilities after talking for the
// first `talk_turns` turns (unless it has to play earlier).
class BiasedRpsAgent : public AgentPolicy {
 public:
  BiasedRpsAgent(std::array<double, 3> probs, int talk_turns = 1);

  std::string name() const override;
  ActResult Act(const dialogue::Conversation& conversation, int player,
                util::Rng& rng) override;
  Distribution ElicitProbs(const dialogue::Conversation& conversation, int player,
                           const std::vector<game::Action>& candidates,
                           ElicitTarget target) override;

  // Move distribution for `player`'s next play, with illegal moves removed.
  virtual std::array<double, 3> MoveDistribution(
      const dialogue::Conversation& conversation, int player) const;

 protected:
  std::array<double, 3> probs_;
  int talk_turns_;
};

// Starts from `base` and, when the opponent's latest talk mentions a move m,
// adds `bias` to the move that beats m, scaling the other two so the total
// stays 1.
class HintResponsiveRpsAgent : public BiasedRpsAgent {
 public:
  HintResponsiveRpsAgent(double bias, std::array<double, 3> base = {1.0 / 3, 1.0 / 3, 1.0 / 3},
                         int talk_turns = 1);

  std::string name() const override;
  std::array<double, 3> MoveDistribution(const dialogue::Conversation& conversation,
                                         int player) const override;

 private:
  double bias_;
};

// Posts the monopoly price in the first round, then copies the opponent's
// previous price.
class BertrandTitForTatAgent : public AgentPolicy {
 public:
  std::string name() const override { return "titfortat"; }
  ActResult Act(const dialogue::Conversation& conversation, int player,
                util::Rng& rng) override;
  Distribution ElicitProbs(const dialogue::Conversation& conversation, int player,
                           const std::vector<game::Action>& candidates,
                           ElicitTarget target) override;

  std::int64_t NextPrice(const dialogue::Conversation& conversation, int player) const;
};

// Opens at the price that leaves the other side no surplus on the Nash
// bargaining quantity and concedes a fraction `rate` of the remaining gap to
// its own reservation price every turn. Accepts any standing offer at least
// as good for it as its next proposal.
class BargainingConcessionAgent : public AgentPolicy {
 public:
  explicit BargainingConcessionAgent(double rate);

  std::string name() const override;
  ActResult Act(const dialogue::Conversation& conversation, int player,
                util::Rng& rng) override;
  Distribution ElicitProbs(const dialogue::Conversation& conversation, int player,
                           const std::vector<game::Action>& candidates,
                           ElicitTarget target) override;

  game::Action NextAction(const dialogue::Conversation& conversation, int player) const;
  game::Proposal NextProposal(const dialogue::Conversation& conversation,
                              int player) const;

 private:
  double rate_;
};

// Builds a scripted agent from a spec string:
//   biased_rps:PR,PP,PS[,TALK_TURNS]   hint_rps:BIAS[,PR,PP,PS]
//   titfortat                          concession:RATE
// Throws std::invalid_argument for unknown kinds or bad parameters.
std::unique_ptr<AgentPolicy> MakeScriptedAgent(const std::string& spec);

// Game a scripted agent spec plays, or nullopt for unknown kinds.
std::optional<game::GameKind> ScriptedAgentGame(const std::string& spec);
// Fixed agent used when none is configured for `kind`.
std::string DefaultScriptedAgent(game::GameKind kind);

}  // namespace talkgames::agents

#endif  // TALKGAMES_AGENTS_SCRIPTED_H_
