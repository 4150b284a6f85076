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

#include "talkgames/agents/template_policy.h"

#include <algorithm>
#include <cmath>

#include "talkgames/game/rules.h"

namespace talkgames::agents {
namespace {

// Feature slot offsets.
constexpr int kBias = 0;
constexpr int kPhase = 1;
constexpr int kOwnTurn = 4;
constexpr int kOppTalk = 9;
constexpr int kOwnTalk = 15;
constexpr int kRevealed = 21;

constexpr int kModeTalk = 0;
constexpr int kModePlay = 1;

const std::vector<std::string> kRpsThink = {
    "I should pick the move with the best expected payoff.",
    "Let me see what my opponent reveals before committing.",
    "Mixing things up keeps me unpredictable.",
    "My opponent's words may give away their plan.",
};

const std::vector<std::string> kRpsTalk = {
    "I'm going to play rock.",
    "I'm going to play paper.",
    "I'm going to play scissors.",
    "Good luck, let's have a fun game!",
    "What are you planning to go with this time?",
    "I have a good feeling about this one.",
    "Let's keep it honest and see who wins.",
    "I've been thinking hard about my strategy.",
    "Take your time, I'm in no hurry.",
};

const std::vector<std::string> kBertrandThink = {
    "High prices on both sides would pay off for everyone.",
    "Capturing the whole market this round could be worth it.",
    "I should react to what my rival charged last time.",
    "Staying close to my costs limits my downside.",
};

const std::vector<std::string> kBertrandTalk = {
    "Let's both keep prices high so we share the profits.",
    "I plan to hold my price steady this round.",
    "Undercutting each other only hurts us both.",
    "I'm willing to match whatever price you set.",
    "Demand is strong, there is room for higher prices.",
    "I might lower my price if you undercut me.",
    "What price are you thinking of this round?",
    "Cooperation has worked well for us so far.",
};

const std::vector<std::string> kBargainingThink = {
    "I want to keep most of the surplus for myself.",
    "A fair split is better than no deal at all.",
    "The number of units changes how much value is on the table.",
    "Time is limited, so I should not wait too long.",
};

const std::vector<std::string> kBargainingTalk = {
    "This deal is fair for both of us.",
    "I can't go much further than this, it's a strong offer.",
    "Let's meet somewhere in the middle.",
    "I need a better price to make this work.",
    "Quantity matters to me, let's settle the units.",
    "We're running out of time, let's close the deal.",
    "What would make this work for you?",
    "I think we're close to an agreement.",
};

constexpr double kBargainFractions[] = {0.1, 0.3, 0.5, 0.7, 0.9};

std::optional<std::string> LastTalk(const dialogue::Conversation& conversation,
                                    int player) {
  const auto& turns = conversation.turns();
  for (auto it = turns.rbegin(); it != turns.rend(); ++it) {
    if (it->player == player) return it->talk ? it->talk : std::optional<std::string>("");
  }
  return std::nullopt;
}

bool Contains(const std::string& haystack, std::initializer_list<const char*> words) {
  for (const char* w : words) {
    if (haystack.find(w) != std::string::npos) return true;
  }
  return false;
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TemplatePolicy::TemplatePolicy(game::GameKind kind, std::string name)
    : kind_(kind), name_(std::move(name)) {
  std::vector<int> sizes;
  std::vector<std::string> names;
  switch (kind_) {
    case game::GameKind::kRps:
      think_texts_ = kRpsThink;
      talk_texts_ = kRpsTalk;
      sizes = {4, 2, static_cast<int>(kRpsTalk.size()), 3, 3};
      names = {"think", "mode", "talk", "play", "belief"};
      mode_stage_ = 1;
      talk_stage_ = 2;
      play_stage_ = 3;
      belief_stage_ = 4;
      break;
    case game::GameKind::kBertrand:
      think_texts_ = kBertrandThink;
      talk_texts_ = kBertrandTalk;
      sizes = {4, static_cast<int>(kBertrandTalk.size()), 8, 8};
      names = {"think", "talk", "play", "belief"};
      talk_stage_ = 1;
      play_stage_ = 2;
      belief_stage_ = 3;
      break;
    case game::GameKind::kBargaining:
      think_texts_ = kBargainingThink;
      talk_texts_ = kBargainingTalk;
      sizes = {4, static_cast<int>(kBargainingTalk.size()), 9, 9};
      names = {"think", "talk", "play", "belief"};
      talk_stage_ = 1;
      play_stage_ = 2;
      belief_stage_ = 3;
      break;
  }
  model_ = SoftmaxModel(kNumFeatures, sizes, names);
  params_.assign(static_cast<std::size_t>(model_.num_params()), 0.0);
}

int TemplatePolicy::num_emitters() const { return model_.stage_size(play_stage_); }

int TemplatePolicy::TalkCategory(const std::string& raw) const {
  if (kind_ == game::GameKind::kRps) {
    const auto moves = dialogue::MentionedMoves(raw);
    if (moves.size() == 1) return 1 + static_cast<int>(moves.front());
    if (moves.size() > 1) return 4;
    return 5;
  }
  const std::string text = Lower(raw);
  if (Contains(text, {"accept", "deal", "agree"})) return 4;
  if (Contains(text, {"cooperat", "share", "together", "fair", "both", "steady", "match"}))
    return 1;
  if (Contains(text, {"lower", "undercut", "cheap", "better price", "further"})) return 2;
  if (text.find('?') != std::string::npos) return 3;
  return 5;
}

FeatureVector TemplatePolicy::Features(const dialogue::Conversation& conversation,
                                       int player) const {
  FeatureVector x;
  x.push_back({kBias, 1.0});
  const int other = 1 - player;
  int phase = 0;
  int revealed = 0;
  switch (kind_) {
    case game::GameKind::kRps:
      if (conversation.rps_move(other)) {
        phase = 1;
        revealed = 1;
      } else if (conversation.turns_left(player) <= 1) {
        phase = 2;
      }
      break;
    case game::GameKind::kBertrand: {
      const int round = conversation.current_round();
      const int rounds = conversation.spec().bertrand.rounds;
      phase = round == 0 ? 0 : (round + 1 >= rounds ? 2 : 1);
      const auto& history = conversation.bertrand_rounds();
      if (!history.empty()) {
        const auto mine = history.back().prices[player];
        const auto theirs = history.back().prices[other];
        revealed = theirs < mine ? 1 : (theirs == mine ? 2 : 3);
      }
      break;
    }
    case game::GameKind::kBargaining: {
      const auto offer = conversation.offer_to(player);
      phase = conversation.turns_left(player) <= 1 ? 2 : (offer ? 1 : 0);
      if (offer) {
        const auto& b = conversation.spec().bargaining;
        const auto nbs = game::BargainingNashSolution(b);
        const game::Proposal fair{nbs.units, game::ToCents(nbs.unit_price)};
        const bool seller = player == conversation.seller();
        const auto u_offer = game::BargainingUtilities(*offer, b);
        const auto u_fair = game::BargainingUtilities(fair, b);
        const double mine = seller ? u_offer.self : u_offer.other;
        const double ref = seller ? u_fair.self : u_fair.other;
        const double band = 0.05 * std::abs(ref);
        revealed = mine < ref - band ? 1 : (mine > ref + band ? 3 : 2);
      }
      break;
    }
  }
  x.push_back({kPhase + phase, 1.0});
  x.push_back({kOwnTurn + std::min(conversation.turns_taken(player), 4), 1.0});
  const auto opp_talk = LastTalk(conversation, other);
  x.push_back({kOppTalk + (opp_talk ? TalkCategory(*opp_talk) : 0), 1.0});
  const auto own_talk = LastTalk(conversation, player);
  x.push_back({kOwnTalk + (own_talk ? TalkCategory(*own_talk) : 0), 1.0});
  x.push_back({kRevealed + revealed, 1.0});
  return x;
}

Decision TemplatePolicy::MakeDecision(int stage, const FeatureVector& x,
                                      std::vector<char> legal) const {
  Decision d;
  d.stage = stage;
  d.features = x;
  d.legal = std::move(legal);
  return d;
}

game::Action TemplatePolicy::Emit(const dialogue::Conversation& conversation,
                                  int player, int c) const {
  switch (kind_) {
    case game::GameKind::kRps:
      return static_cast<game::RpsMove>(c);
    case game::GameKind::kBertrand: {
      const auto& b = conversation.spec().bertrand;
      const double lo = std::ceil(b.cost);
      const double margin = b.p_max - b.cost;
      const auto monopoly = std::lround(game::BertrandMonopoly(b).price);
      const auto& history = conversation.bertrand_rounds();
      std::int64_t price = 0;
      switch (c) {
        case 0: price = static_cast<std::int64_t>(lo); break;
        case 1: price = static_cast<std::int64_t>(lo) + 1; break;
        case 2: price = std::lround(b.cost + 0.25 * margin); break;
        case 3: price = monopoly; break;
        case 4: price = std::lround(b.cost + 0.75 * margin); break;
        case 5: price = history.empty() ? monopoly : history.back().prices[1 - player]; break;
        case 6:
          price = (history.empty() ? monopoly : history.back().prices[1 - player]) - 1;
          break;
        default: price = history.empty() ? monopoly : history.back().prices[player]; break;
      }
      return game::Price{std::max<std::int64_t>(0, price)};
    }
    case game::GameKind::kBargaining: {
      if (c == 8) return game::Accept{};
      const auto& b = conversation.spec().bargaining;
      const int n_eq = std::max(1, static_cast<int>(std::floor(b.value / b.cost)));
      const auto at = [&](int n, double f) {
        const double break_even = b.value * game::Harmonic(n) / n;
        return game::Proposal{n, game::ToCents(b.cost + f * (break_even - b.cost))};
      };
      if (c < 5) return at(n_eq, kBargainFractions[c]);
      if (c == 5) return at(std::max(1, n_eq - 1), 0.5);
      if (c == 6) return at(n_eq + 1, 0.5);
      const auto& own = conversation.last_proposal(player);
      return own ? *own : at(n_eq, 0.5);
    }
  }
  throw std::logic_error("unknown game");
}

std::vector<char> TemplatePolicy::PlayMask(const dialogue::Conversation& conversation,
                                           int player) const {
  std::vector<char> legal(static_cast<std::size_t>(num_emitters()), 1);
  const auto actions = conversation.legal_actions(player);
  if (kind_ == game::GameKind::kRps) {
    for (int m = 0; m < 3; ++m) {
      legal[m] = std::find(actions.moves.begin(), actions.moves.end(),
                           static_cast<game::RpsMove>(m)) != actions.moves.end();
    }
  } else if (kind_ == game::GameKind::kBargaining) {
    legal[8] = actions.accept;
  }
  return legal;
}

TemplatePolicy::Sampled TemplatePolicy::Sample(const dialogue::Conversation& conversation,
                                               int player, util::Rng& rng) const {
  if (conversation.spec().kind != kind_) {
    throw std::invalid_argument("template policy built for another game");
  }
  const auto x = Features(conversation, player);
  Sampled out;
  const auto choose = [&](Decision d) {
    const auto p = model_.Probs(params_, d);
    d.choice = static_cast<int>(rng.Categorical(p));
    out.decisions.push_back(std::move(d));
    return out.decisions.back().choice;
  };
  out.content.think = think_texts_[choose(MakeDecision(think_stage(), x, {}))];
  bool play = true;
  if (mode_stage_ != kNoStage) {
    const bool forced = conversation.must_play(player);
    play = choose(MakeDecision(mode_stage_, x, {static_cast<char>(!forced), 1})) ==
           kModePlay;
  }
  if (!play || kind_ != game::GameKind::kRps) {
    out.content.talk = talk_texts_[choose(MakeDecision(talk_stage_, x, {}))];
  }
  if (play) {
    const int c = choose(MakeDecision(play_stage_, x, PlayMask(conversation, player)));
    out.content.play = Emit(conversation, player, c);
  }
  return out;
}

ActResult TemplatePolicy::Act(const dialogue::Conversation& conversation, int player,
                              util::Rng& rng) {
  auto sampled = Sample(conversation, player, rng);
  ActResult result;
  result.text = dialogue::SerializeTurn(sampled.content);
  for (const auto& d : sampled.decisions) result.trace.push_back(d.choice);
  return result;
}

std::vector<Decision> TemplatePolicy::DecisionsFor(const dialogue::Conversation& before,
                                                   const dialogue::Turn& turn) const {
  if (turn.forced) throw SupportError("forced turns have no template path");
  const int player = turn.player;
  const auto x = Features(before, player);
  std::vector<Decision> decisions;
  std::size_t cursor = 0;
  const auto take = [&](Decision d, int inverted) {
    int choice = inverted;
    if (!turn.trace.empty()) {
      if (cursor >= turn.trace.size()) throw SupportError("trace too short");
      choice = turn.trace[cursor++];
    }
    if (choice < 0 || choice >= model_.stage_size(d.stage) ||
        (!d.legal.empty() && !d.legal[static_cast<std::size_t>(choice)])) {
      throw SupportError("turn is outside the template support");
    }
    d.choice = choice;
    decisions.push_back(std::move(d));
    return choice;
  };
  const auto index_of = [&](const std::vector<std::string>& texts,
                            const std::optional<std::string>& text) {
    if (!turn.trace.empty()) return 0;
    if (!text) return -1;
    const auto it = std::find(texts.begin(), texts.end(), *text);
    return it == texts.end() ? -1 : static_cast<int>(it - texts.begin());
  };

  const int think = take(MakeDecision(think_stage(), x, {}),
                         index_of(think_texts_, turn.think));
  if (think_texts_[think] != turn.think) throw SupportError("unknown reasoning text");
  bool play = true;
  if (mode_stage_ != kNoStage) {
    if (turn.talk && turn.play) throw SupportError("template turns either talk or play");
    const bool forced = before.must_play(player);
    play = take(MakeDecision(mode_stage_, x, {static_cast<char>(!forced), 1}),
                turn.play ? kModePlay : kModeTalk) == kModePlay;
  }
  if (!play || kind_ != game::GameKind::kRps) {
    const int talk = take(MakeDecision(talk_stage_, x, {}), index_of(talk_texts_, turn.talk));
    if (!turn.talk || talk_texts_[talk] != *turn.talk) {
      throw SupportError("unknown talk text");
    }
  } else if (turn.talk) {
    throw SupportError("unexpected talk text");
  }
  if (play) {
    if (!turn.play) throw SupportError("missing game action");
    const auto mask = PlayMask(before, player);
    int inverted = -1;
    for (int c = 0; c < num_emitters() && inverted < 0; ++c) {
      if (mask[c] && Emit(before, player, c) == *turn.play) inverted = c;
    }
    const int c = take(MakeDecision(play_stage_, x, mask), inverted);
    if (!(Emit(before, player, c) == *turn.play)) throw SupportError("unknown game action");
  } else if (turn.play) {
    throw SupportError("unexpected game action");
  }
  if (!turn.trace.empty() && cursor != turn.trace.size()) {
    throw SupportError("trace too long");
  }
  return decisions;
}

Distribution TemplatePolicy::ElicitProbs(const dialogue::Conversation& conversation,
                                         int player,
                                         const std::vector<game::Action>& candidates,
                                         ElicitTarget target) {
  const bool self = target == ElicitTarget::kSelf;
  const int actor = self ? player : 1 - player;
  const auto x = Features(conversation, player);
  const auto mask = PlayMask(conversation, actor);
  const auto probs = model_.Probs(params_, MakeDecision(self ? play_stage_ : belief_stage_,
                                                        x, mask));
  std::vector<double> w(candidates.size(), 0.0);
  for (int c = 0; c < num_emitters(); ++c) {
    if (probs[c] == 0.0) continue;
    const auto action = Emit(conversation, actor, c);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i] == action) w[i] += probs[c];
    }
  }
  return Distribution::Normalized(candidates, std::move(w));
}

}  // namespace talkgames::agents
