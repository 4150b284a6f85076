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

#ifndef TALKGAMES_AGENTS_POLICY_H_
#define TALKGAMES_AGENTS_POLICY_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/dialogue/conversation.h"
#include "talkgames/game/types.h"
#include "talkgames/util/random.h"

namespace talkgames::agents {

// Probability distribution over an ordered list of game actions.
struct Distribution {
  std::vector<game::Action> support;
  std::vector<double> probs;
  // Set when the source could not produce probabilities and uniform was used.
  bool fallback = false;

  static Distribution Uniform(std::vector<game::Action> support);
  // Clamps negatives to zero and rescales to sum 1; uniform if all zero.
  static Distribution Normalized(std::vector<game::Action> support,
                                 std::vector<double> weights);

  std::size_t size() const { return support.size(); }
  double ProbabilityOf(const game::Action& action) const;
  // Throws std::invalid_argument unless probs are non-negative and sum to 1.
  void Check(double tol = 1e-9) const;
};

enum class ElicitTarget { kSelf, kOpponent };

struct ActResult {
  std::string text;
  // Choice indices for policies with an explicit sampling chain.
  std::vector<int> trace;
};

// Raised when a policy cannot produce output at all (for example a remote
// endpoint that stays down through the retry budget).
class AgentUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;

  virtual std::string name() const = 0;

  // Produces the raw tagged text of `player`'s next turn.
  virtual ActResult Act(const dialogue::Conversation& conversation, int player,
                        util::Rng& rng) = 0;

  // Next-action distribution over `candidates` as judged by `player`:
  // kSelf is the player's own next game action; kOpponent is the player's
  // belief about the opponent's next game action.
  virtual Distribution ElicitProbs(const dialogue::Conversation& conversation,
                                   int player,
                                   const std::vector<game::Action>& candidates,
                                   ElicitTarget target) = 0;

  virtual bool trainable() const { return false; }
  virtual bool has_exact_logprobs() const { return false; }
};

// Candidate game actions used for elicitation: the three moves for RPS and
// the integer grid [0, floor(p_max)] for Bertrand. Bargaining has none.
std::vector<game::Action> CandidateActions(const game::GameSpec& spec);

}  // namespace talkgames::agents

#endif  // TALKGAMES_AGENTS_POLICY_H_
