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

#include "talkgames/agents/scripted.h"

#include <cmath>
#include <sstream>

#include "talkgames/dialogue/turn.h"
#include "talkgames/game/rules.h"

namespace talkgames::agents {
namespace {

constexpr const char* kRpsChatter[] = {
    "Good luck, may the best player win!",
    "Let's have a fair game.",
    "I'm ready when you are.",
};

std::string Compose(const std::string& think, const std::optional<std::string>& talk,
                    const std::optional<game::Action>& play) {
  return dialogue::SerializeTurn({think, talk, play});
}

std::vector<double> ParseNumbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "' in agent spec");
    }
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void CheckProbs(const std::array<double, 3>& p) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("move probabilities must be non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("move probabilities must sum to 1");
  }
}

// Turn index of `player`'s game action, or the number of turns if none yet.
std::size_t PlayTurnIndex(const dialogue::Conversation& conversation, int player) {
  for (const auto& t : conversation.turns()) {
    if (t.player == player && t.play) return static_cast<std::size_t>(t.index);
  }
  return conversation.turns().size();
}

Distribution OverCandidates(const std::vector<game::Action>& candidates,
                            const std::vector<game::Action>& support,
                            const std::vector<double>& probs) {
  std::vector<double> w(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (candidates[i] == support[j]) w[i] += probs[j];
    }
  }
  return Distribution::Normalized(candidates, std::move(w));
}

}  // namespace

BiasedRpsAgent::BiasedRpsAgent(std::array<double, 3> probs, int talk_turns)
    : probs_(probs), talk_turns_(talk_turns) {
  CheckProbs(probs_);
  if (talk_turns_ < 0) throw std::invalid_argument("talk_turns must be >= 0");
}

std::string BiasedRpsAgent::name() const {
  std::ostringstream out;
  out << "biased_rps:" << probs_[0] << "," << probs_[1] << "," << probs_[2];
  return out.str();
}

std::array<double, 3> BiasedRpsAgent::MoveDistribution(
    const dialogue::Conversation& conversation, int player) const {
  auto p = probs_;
  const auto legal = conversation.legal_actions(player).moves;
  double total = 0.0;
  for (int m = 0; m < 3; ++m) {
    if (std::find(legal.begin(), legal.end(), static_cast<game::RpsMove>(m)) == legal.end()) {
      p[m] = 0.0;
    }
    total += p[m];
  }
  if (total <= 0.0) {
    for (auto m : legal) p[static_cast<int>(m)] = 1.0;
    total = static_cast<double>(legal.size());
  }
  for (double& v : p) v /= total;
  return p;
}

ActResult BiasedRpsAgent::Act(const dialogue::Conversation& conversation, int player,
                              util::Rng& rng) {
  if (!conversation.must_play(player) && conversation.turns_taken(player) < talk_turns_) {
    const auto i = rng.UniformInt(0, std::size(kRpsChatter) - 1);
    return {Compose("Chatting before I commit to a move.", std::string(kRpsChatter[i]),
                    std::nullopt), {}};
  }
  const auto p = MoveDistribution(conversation, player);
  const auto m = static_cast<game::RpsMove>(rng.Categorical(p));
  return {Compose("Playing according to my plan.", std::nullopt, m), {}};
}

Distribution BiasedRpsAgent::ElicitProbs(const dialogue::Conversation& conversation,
                                         int player,
                                         const std::vector<game::Action>& candidates,
                                         ElicitTarget target) {
  if (target == ElicitTarget::kOpponent) return Distribution::Uniform(candidates);
  const auto p = MoveDistribution(conversation, player);
  return OverCandidates(candidates,
                        {game::RpsMove::kRock, game::RpsMove::kPaper,
                         game::RpsMove::kScissors},
                        {p[0], p[1], p[2]});
}

HintResponsiveRpsAgent::HintResponsiveRpsAgent(double bias, std::array<double, 3> base,
                                               int talk_turns)
    : BiasedRpsAgent(base, talk_turns), bias_(bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    throw std::invalid_argument("hint bias must be in [0, 1]");
  }
}

std::string HintResponsiveRpsAgent::name() const {
  std::ostringstream out;
  out << "hint_rps:" << bias_;
  return out.str();
}

std::array<double, 3> HintResponsiveRpsAgent::MoveDistribution(
    const dialogue::Conversation& conversation, int player) const {
  auto p = probs_;
  // Only talk heard before this agent committed to its move can matter.
  const std::size_t limit = PlayTurnIndex(conversation, player);
  std::optional<game::RpsMove> hinted;
  for (std::size_t i = limit; i-- > 0;) {
    const auto& t = conversation.turns()[i];
    if (t.player == player || !t.talk) continue;
    const auto moves = dialogue::MentionedMoves(*t.talk);
    if (!moves.empty()) hinted = moves.front();
    break;
  }
  if (hinted) {
    const int c = static_cast<int>(game::RpsCounter(*hinted));
    const double target = std::min(1.0, p[c] + bias_);
    const double rest = 1.0 - p[c];
    for (int m = 0; m < 3; ++m) {
      if (m == c) continue;
      p[m] = rest > 0.0 ? p[m] * (1.0 - target) / rest : 0.0;
    }
    p[c] = target;
  }
  BiasedRpsAgent shifted(p, talk_turns_);
  return shifted.BiasedRpsAgent::MoveDistribution(conversation, player);
}

std::int64_t BertrandTitForTatAgent::NextPrice(const dialogue::Conversation& conversation,
                                               int player) const {
  const auto& rounds = conversation.bertrand_rounds();
  if (rounds.empty()) {
    return static_cast<std::int64_t>(
        std::floor(game::BertrandMonopoly(conversation.spec().bertrand).price));
  }
  return rounds.back().prices[1 - player];
}

ActResult BertrandTitForTatAgent::Act(const dialogue::Conversation& conversation,
                                      int player, util::Rng& /*rng*/) {
  const auto price = NextPrice(conversation, player);
  return {Compose("I mirror what my rival did last round.",
                  "I suggest we both keep our prices at $" + std::to_string(price) +
                      " so everyone profits.",
                  game::Price{price}),
          {}};
}

Distribution BertrandTitForTatAgent::ElicitProbs(
    const dialogue::Conversation& conversation, int player,
    const std::vector<game::Action>& candidates, ElicitTarget target) {
  if (target == ElicitTarget::kOpponent) return Distribution::Uniform(candidates);
  return OverCandidates(candidates, {game::Price{NextPrice(conversation, player)}}, {1.0});
}

BargainingConcessionAgent::BargainingConcessionAgent(double rate) : rate_(rate) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("concession rate must be in (0, 1]");
  }
}

std::string BargainingConcessionAgent::name() const {
  std::ostringstream out;
  out << "concession:" << rate_;
  return out.str();
}

game::Proposal BargainingConcessionAgent::NextProposal(
    const dialogue::Conversation& conversation, int player) const {
  const auto& b = conversation.spec().bargaining;
  const int n = std::max(1, static_cast<int>(std::floor(b.value / b.cost)));
  const double buyer_break_even = b.value * game::Harmonic(n) / n;
  const bool seller = player == conversation.seller();
  const double anchor = seller ? buyer_break_even : b.cost;
  const double reservation = seller ? b.cost : buyer_break_even;
  const double conceded =
      1.0 - std::pow(1.0 - rate_, conversation.turns_taken(player));
  const double price = anchor + (reservation - anchor) * conceded;
  return {n, game::ToCents(price)};
}

game::Action BargainingConcessionAgent::NextAction(
    const dialogue::Conversation& conversation, int player) const {
  const auto proposal = NextProposal(conversation, player);
  if (const auto offer = conversation.offer_to(player)) {
    const auto& b = conversation.spec().bargaining;
    const bool seller = player == conversation.seller();
    const auto mine = game::BargainingUtilities(proposal, b);
    const auto theirs = game::BargainingUtilities(*offer, b);
    const double u_offer = seller ? theirs.self : theirs.other;
    const double u_mine = seller ? mine.self : mine.other;
    // A final chance to agree is worth taking whenever the deal is positive.
    const bool last_turn = conversation.turns_left(player) <= 1;
    if (u_offer >= u_mine || (last_turn && u_offer > 0.0)) return game::Accept{};
  }
  return proposal;
}

ActResult BargainingConcessionAgent::Act(const dialogue::Conversation& conversation,
                                         int player, util::Rng& /*rng*/) {
  const auto action = NextAction(conversation, player);
  const bool accept = std::holds_alternative<game::Accept>(action);
  return {Compose(accept ? "That offer works for me." : "I will concede a little.",
                  accept ? "You have a deal." : "Here is my improved offer.",
                  action),
          {}};
}

Distribution BargainingConcessionAgent::ElicitProbs(
    const dialogue::Conversation& conversation, int player,
    const std::vector<game::Action>& candidates, ElicitTarget target) {
  if (target == ElicitTarget::kOpponent) return Distribution::Uniform(candidates);
  return OverCandidates(candidates, {NextAction(conversation, player)}, {1.0});
}

std::unique_ptr<AgentPolicy> MakeScriptedAgent(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<double>{}
                                               : ParseNumbers(spec.substr(colon + 1));
  if (kind == "biased_rps") {
    if (args.size() != 3 && args.size() != 4) {
      throw std::invalid_argument("biased_rps needs PR,PP,PS[,TALK_TURNS]");
    }
    return std::make_unique<BiasedRpsAgent>(
        std::array<double, 3>{args[0], args[1], args[2]},
        args.size() == 4 ? static_cast<int>(args[3]) : 1);
  }
  if (kind == "uniform_rps") {
    return std::make_unique<BiasedRpsAgent>(
        std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  }
  if (kind == "hint_rps") {
    if (args.size() != 1 && args.size() != 4) {
      throw std::invalid_argument("hint_rps needs BIAS[,PR,PP,PS]");
    }
    if (args.size() == 4) {
      return std::make_unique<HintResponsiveRpsAgent>(
          args[0], std::array<double, 3>{args[1], args[2], args[3]});
    }
    return std::make_unique<HintResponsiveRpsAgent>(args[0]);
  }
  if (kind == "titfortat") {
    if (!args.empty()) throw std::invalid_argument("titfortat takes no parameters");
    return std::make_unique<BertrandTitForTatAgent>();
  }
  if (kind == "concession") {
    if (args.size() != 1) throw std::invalid_argument("concession needs RATE");
    return std::make_unique<BargainingConcessionAgent>(args[0]);
  }
  throw std::invalid_argument("unknown scripted agent '" + kind + "'");
}

std::optional<game::GameKind> ScriptedAgentGame(const std::string& spec) {
  const std::string kind = spec.substr(0, spec.find(':'));
  if (kind == "biased_rps" || kind == "uniform_rps" || kind == "hint_rps") {
    return game::GameKind::kRps;
  }
  if (kind == "titfortat") return game::GameKind::kBertrand;
  if (kind == "concession") return game::GameKind::kBargaining;
  return std::nullopt;
}

std::string DefaultScriptedAgent(game::GameKind kind) {
  switch (kind) {
    case game::GameKind::kRps:
      return "biased_rps:0.4,0.3,0.3";
    case game::GameKind::kBertrand:
      return "titfortat";
    case game::GameKind::kBargaining:
      return "concession:0.3";
  }
  throw std::invalid_argument("unknown game kind");
}

}  // namespace talkgames::agents
