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

#ifndef TALKGAMES_DIALOGUE_TURN_H_
#define TALKGAMES_DIALOGUE_TURN_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "talkgames/game/types.h"

namespace talkgames::dialogue {

// The parts of one agent output.
struct TurnContent {
  std::string think;
  std::optional<std::string> talk;
  std::optional<game::Action> play;

  friend bool operator==(const TurnContent&, const TurnContent&) = default;
};

struct Turn {
  int index = 0;
  int player = 0;
  std::string think;
  std::optional<std::string> talk;
  std::optional<game::Action> play;
  // Set when the action was chosen by the fallback after repeated failures.
  bool forced = false;
  // System notices delivered to `player` since their previous turn.
  std::vector<std::string> injections_before;
  // Choice indices of the policy that produced the turn, when known.
  std::vector<int> trace;

  TurnContent content() const { return {think, talk, play}; }
  friend bool operator==(const Turn&, const Turn&) = default;
};

enum class ParseErrorKind {
  kMissingThink,
  kMissingAction,
  kConflictingTags,
  kUnparseableAction,
};

std::string_view ParseErrorKindName(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  // [begin, end) is the byte range of the offending input.
  ParseError(ParseErrorKind kind, std::size_t begin, std::size_t end,
             const std::string& detail);

  ParseErrorKind kind() const { return kind_; }
  std::size_t begin() const { return begin_; }
  std::size_t end() const { return end_; }

 private:
  ParseErrorKind kind_;
  std::size_t begin_;
  std::size_t end_;
};

// Extracts think/talk/play from raw agent text. RPS turns need think and at
// least one of talk/play; Bertrand turns need all three; bargaining turns need
// think and play with optional talk.
TurnContent ParseAgentOutput(std::string_view text, const game::GameSpec& spec);

// Parses the body of a <play> tag. Throws ParseError(kUnparseableAction) with
// offsets relative to `body`.
game::Action ParsePlay(std::string_view body, game::GameKind kind);

// Canonical text of an action: "rock", "$150", "15 units at $8.33 each",
// "accept".
std::string FormatAction(const game::Action& action);

// "<think> .. </think> <talk> .. </talk> <play> .. </play>", omitting absent
// parts.
std::string SerializeTurn(const TurnContent& content);

// Move names mentioned in free text, in order of first mention.
std::vector<game::RpsMove> MentionedMoves(std::string_view text);

}  // namespace talkgames::dialogue

#endif  // TALKGAMES_DIALOGUE_TURN_H_
