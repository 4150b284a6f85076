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

#ifndef TALKGAMES_DIALOGUE_CONVERSATION_H_
#define TALKGAMES_DIALOGUE_CONVERSATION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/dialogue/templates.h"
#include "talkgames/dialogue/turn.h"
#include "talkgames/game/rules.h"
#include "talkgames/game/types.h"

namespace talkgames::dialogue {

class OutOfTurn : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A well-formed turn that the game rules do not allow at this point.
class IllegalAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TerminalConversation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct PlayerView {
  int player = 0;
  std::vector<Message> messages;
};

struct BertrandRound {
  std::array<std::int64_t, 2> prices{};
  std::array<double, 2> profits{};
};

// Game state plus the dialogue transcript. Players alternate strictly,
// starting with player 0.
class Conversation {
 public:
  explicit Conversation(game::GameSpec spec, std::uint64_t seed = 0,
                        const TemplateLibrary* templates = nullptr);

  const game::GameSpec& spec() const { return spec_; }
  const TemplateLibrary& templates() const { return *templates_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Turn>& turns() const { return turns_; }

  bool terminal() const { return terminal_; }
  // Player expected to move next; -1 once terminal.
  int current_player() const;
  int turns_taken(int player) const { return turns_taken_[player]; }
  int turns_left(int player) const;

  // True when `player`'s next turn must contain a game action.
  bool must_play(int player) const;
  // True when `player` may talk on their next turn.
  bool can_talk(int player) const;
  game::ActionSet legal_actions(int player) const;

  // Checks that `content` is acceptable for the current player without
  // applying it. Throws IllegalAction.
  void Validate(const TurnContent& content) const;
  // Appends a turn for the current player. Throws TerminalConversation,
  // IllegalAction.
  const Turn& Apply(const TurnContent& content, bool forced = false,
                    std::vector<int> trace = {});
  // Appends a fully specified turn; index and player must match the state.
  // Throws OutOfTurn in addition to the errors of Apply.
  const Turn& Step(const Turn& turn);

  // What `player` sees: setting prompt, own turns with their private
  // reasoning, the opponent's public talk, and system notices.
  PlayerView View(int player) const;

  // Utilities per player once terminal.
  const std::optional<std::array<double, 2>>& outcome() const { return outcome_; }

  // Game state accessors.
  const std::optional<game::RpsMove>& rps_move(int player) const {
    return rps_moves_[player];
  }
  const std::vector<BertrandRound>& bertrand_rounds() const { return rounds_; }
  // Completed plus in-progress Bertrand round index (0-based).
  int current_round() const { return static_cast<int>(rounds_.size()); }
  // Latest proposal made by `player`, if any.
  const std::optional<game::Proposal>& last_proposal(int player) const {
    return last_proposal_[player];
  }
  // The opponent proposal `player` could accept right now.
  std::optional<game::Proposal> offer_to(int player) const;
  const std::optional<game::Proposal>& agreed_deal() const { return deal_; }
  int seller() const { return spec_.seller_player; }

  // Notices queued for `player` since their last turn.
  std::vector<std::string> pending_injections(int player) const;

  // Copy that keeps the first `n` turns, rebuilt by replay.
  Conversation Prefix(std::size_t n) const;
  // Same state with a different continuation seed.
  Conversation WithSeed(std::uint64_t seed) const;

 private:
  struct Injection {
    int player;
    std::size_t after_turns;  // number of turns present when it was queued
    std::string text;
  };

  void Queue(int player, std::string text);
  void Resolve(const Turn& turn);

  game::GameSpec spec_;
  std::uint64_t seed_;
  const TemplateLibrary* templates_;
  std::vector<Turn> turns_;
  std::vector<Injection> injections_;
  std::array<int, 2> turns_taken_{0, 0};
  bool terminal_ = false;
  std::optional<std::array<double, 2>> outcome_;

  std::array<std::optional<game::RpsMove>, 2> rps_moves_;
  std::vector<BertrandRound> rounds_;
  std::optional<std::int64_t> round_first_price_;
  std::array<std::optional<game::Proposal>, 2> last_proposal_;
  std::optional<game::Proposal> deal_;
};

// Splits the root into `k` independent copies whose continuation seeds are
// derived from the root seed and the branch index. Throws
// TerminalConversation.
std::vector<Conversation> Fork(const Conversation& root, int k);

}  // namespace talkgames::dialogue

#endif  // TALKGAMES_DIALOGUE_CONVERSATION_H_
