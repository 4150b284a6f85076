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

#include "talkgames/dialogue/conversation.h"

#include <algorithm>
#include <utility>

#include "talkgames/util/random.h"

namespace talkgames::dialogue {
namespace {

constexpr std::uint64_t kForkStream = 0xF02C;

template <typename T>
const T* ActionAs(const std::optional<game::Action>& play) {
  return play ? std::get_if<T>(&*play) : nullptr;
}

}  // namespace

Conversation::Conversation(game::GameSpec spec, std::uint64_t seed,
                           const TemplateLibrary* templates)
    : spec_(std::move(spec)),
      seed_(seed),
      templates_(templates ? templates : &TemplateLibrary::Builtin()) {
  spec_.Validate();
}

int Conversation::current_player() const {
  if (terminal_) return -1;
  return static_cast<int>(turns_.size() % 2);
}

int Conversation::turns_left(int player) const {
  const int budget = spec_.kind == game::GameKind::kBertrand
                         ? spec_.bertrand.rounds
                         : spec_.max_interactions;
  return std::max(0, budget - turns_taken_[player]);
}

bool Conversation::must_play(int player) const {
  if (spec_.kind != game::GameKind::kRps) return true;
  return rps_moves_[1 - player].has_value() || turns_left(player) <= 1;
}

bool Conversation::can_talk(int /*player*/) const { return true; }

game::ActionSet Conversation::legal_actions(int player) const {
  return game::LegalActions(spec_, player, offer_to(player).has_value());
}

std::optional<game::Proposal> Conversation::offer_to(int player) const {
  if (spec_.kind != game::GameKind::kBargaining) return std::nullopt;
  return last_proposal_[1 - player];
}

void Conversation::Validate(const TurnContent& content) const {
  if (terminal_) throw TerminalConversation("conversation is over");
  const int player = current_player();
  if (content.play && !legal_actions(player).Contains(*content.play)) {
    throw IllegalAction(PlayerName(player) + " cannot play '" +
                        FormatAction(*content.play) + "' now");
  }
  switch (spec_.kind) {
    case game::GameKind::kRps:
      if (!content.play && !content.talk) throw IllegalAction("empty turn");
      if (!content.play && must_play(player)) {
        throw IllegalAction(PlayerName(player) + " must play this turn");
      }
      break;
    case game::GameKind::kBertrand:
      if (!content.talk || !content.play) {
        throw IllegalAction("a Bertrand turn needs talk and a price");
      }
      break;
    case game::GameKind::kBargaining:
      if (!content.play) throw IllegalAction("a bargaining turn needs a deal");
      break;
  }
}

const Turn& Conversation::Apply(const TurnContent& content, bool forced,
                                std::vector<int> trace) {
  Validate(content);
  Turn turn;
  turn.index = static_cast<int>(turns_.size());
  turn.player = current_player();
  turn.think = content.think;
  turn.talk = content.talk;
  turn.play = content.play;
  turn.forced = forced;
  turn.injections_before = pending_injections(turn.player);
  turn.trace = std::move(trace);
  turns_.push_back(std::move(turn));
  ++turns_taken_[turns_.back().player];
  Resolve(turns_.back());
  return turns_.back();
}

const Turn& Conversation::Step(const Turn& turn) {
  if (terminal_) throw TerminalConversation("conversation is over");
  if (turn.index != static_cast<int>(turns_.size()) ||
      turn.player != current_player()) {
    throw OutOfTurn("turn " + std::to_string(turn.index) + " by " +
                    PlayerName(turn.player) + " but expected turn " +
                    std::to_string(turns_.size()) + " by " +
                    PlayerName(current_player()));
  }
  return Apply(turn.content(), turn.forced, turn.trace);
}

void Conversation::Queue(int player, std::string text) {
  injections_.push_back({player, turns_.size(), std::move(text)});
}

void Conversation::Resolve(const Turn& turn) {
  const int player = turn.player;
  const int other = 1 - player;
  switch (spec_.kind) {
    case game::GameKind::kRps: {
      const auto* move = ActionAs<game::RpsMove>(turn.play);
      if (!move) break;
      rps_moves_[player] = *move;
      if (rps_moves_[other]) {
        const auto u = game::RpsPayoff(*rps_moves_[0], *rps_moves_[1]);
        terminal_ = true;
        outcome_ = std::array<double, 2>{u.self, u.other};
      } else {
        Queue(other, RenderOpponentPlayed(*templates_));
      }
      break;
    }
    case game::GameKind::kBertrand: {
      const auto price = ActionAs<game::Price>(turn.play)->value;
      if (!round_first_price_) {
        round_first_price_ = price;
        break;
      }
      BertrandRound round;
      round.prices = {*round_first_price_, price};
      const auto u = game::BertrandRoundPayoff(round.prices[0], round.prices[1],
                                               spec_.bertrand);
      round.profits = {u.self, u.other};
      rounds_.push_back(round);
      round_first_price_.reset();
      for (int p = 0; p < game::kNumPlayers; ++p) {
        Queue(p, RenderRoundResult(round.prices[p], round.prices[1 - p],
                                   round.profits[p], *templates_));
      }
      if (static_cast<int>(rounds_.size()) == spec_.bertrand.rounds) {
        std::array<double, 2> total{0.0, 0.0};
        for (const auto& r : rounds_) {
          total[0] += r.profits[0];
          total[1] += r.profits[1];
        }
        terminal_ = true;
        outcome_ = total;
      }
      break;
    }
    case game::GameKind::kBargaining: {
      if (std::holds_alternative<game::Accept>(*turn.play)) {
        deal_ = last_proposal_[other];
        const auto u = game::BargainingUtilities(deal_, spec_.bargaining);
        std::array<double, 2> utilities{};
        utilities[spec_.seller_player] = u.self;
        utilities[1 - spec_.seller_player] = u.other;
        terminal_ = true;
        outcome_ = utilities;
        break;
      }
      last_proposal_[player] = std::get<game::Proposal>(*turn.play);
      if (turns_left(other) == 0) {
        terminal_ = true;
        outcome_ = std::array<double, 2>{0.0, 0.0};
      }
      break;
    }
  }
}

std::vector<std::string> Conversation::pending_injections(int player) const {
  std::size_t since = 0;
  for (const auto& t : turns_) {
    if (t.player == player) since = static_cast<std::size_t>(t.index) + 1;
  }
  std::vector<std::string> out;
  for (const auto& inj : injections_) {
    if (inj.player == player && inj.after_turns >= since) {
      out.push_back(inj.text);
    }
  }
  return out;
}

PlayerView Conversation::View(int player) const {
  PlayerView view;
  view.player = player;
  view.messages.push_back({"system", RenderSettingPrompt(spec_, player, *templates_)});
  auto inj = injections_.begin();
  const auto flush = [&](std::size_t upto) {
    for (; inj != injections_.end() && inj->after_turns <= upto; ++inj) {
      if (inj->player == player) view.messages.push_back({"system", inj->text});
    }
  };
  for (const auto& t : turns_) {
    flush(static_cast<std::size_t>(t.index));
    if (t.player == player) {
      view.messages.push_back({"assistant", SerializeTurn(t.content())});
      continue;
    }
    if (spec_.kind == game::GameKind::kBargaining) {
      std::string text;
      if (t.talk) text += "<talk> " + *t.talk + " </talk> ";
      text += "<play> " + FormatAction(*t.play) + " </play>";
      view.messages.push_back({"user", text});
    } else if (t.talk) {
      view.messages.push_back({"user", *t.talk});
    }
  }
  flush(turns_.size());
  return view;
}

Conversation Conversation::Prefix(std::size_t n) const {
  Conversation copy(spec_, seed_, templates_);
  for (std::size_t i = 0; i < std::min(n, turns_.size()); ++i) copy.Step(turns_[i]);
  return copy;
}

Conversation Conversation::WithSeed(std::uint64_t seed) const {
  Conversation copy = *this;
  copy.seed_ = seed;
  return copy;
}

std::vector<Conversation> Fork(const Conversation& root, int k) {
  if (root.terminal()) throw TerminalConversation("cannot fork a finished conversation");
  if (k < 1) throw std::invalid_argument("fork needs k >= 1");
  std::vector<Conversation> branches;
  branches.reserve(static_cast<std::size_t>(k));
  for (int b = 0; b < k; ++b) {
    branches.push_back(root.WithSeed(util::DeriveSeed(
        root.seed(), {kForkStream, static_cast<std::uint64_t>(b)})));
  }
  return branches;
}

}  // namespace talkgames::dialogue
