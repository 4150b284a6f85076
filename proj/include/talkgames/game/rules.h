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

#ifndef TALKGAMES_GAME_RULES_H_
#define TALKGAMES_GAME_RULES_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "talkgames/game/types.h"

namespace talkgames::game {

// Rock-paper-scissors stage payoff: 2 for a win, 1 for a tie, 0 for a loss.
UtilityPair RpsPayoff(RpsMove a, RpsMove b);
bool RpsBeats(RpsMove a, RpsMove b);
// The move that beats `move`.
RpsMove RpsCounter(RpsMove move);

double BertrandDemand(double price, const BertrandParams& params);

// One Bertrand round from the point of view of the firm posting `price_a`.
// The strictly cheaper firm sells the whole demand; equal prices split it.
UtilityPair BertrandRoundPayoff(std::int64_t price_a, std::int64_t price_b,
                                const BertrandParams& params);

struct MonopolyOutcome {
  double price = 0.0;
  double total_profit = 0.0;

  // What each firm earns per round when both post the monopoly price.
  double per_firm_collusion() const { return total_profit / 2.0; }
};

MonopolyOutcome BertrandMonopoly(const BertrandParams& params);

// n-th harmonic number. Requires n >= 1.
double Harmonic(int n);

// (seller, buyer) utilities of an agreed deal; no deal gives (0, 0).
UtilityPair BargainingUtilities(const std::optional<Proposal>& deal,
                                const BargainingParams& params);

struct NashBargain {
  int units = 0;
  double unit_price = 0.0;
};

// Symmetric Nash bargaining solution. Throws NoSurplus when value <= cost.
NashBargain BargainingNashSolution(const BargainingParams& params);

// The set of legal game actions for one decision.
struct ActionSet {
  std::vector<RpsMove> moves;     // rock-paper-scissors
  std::int64_t min_price = 0;     // Bertrand, inclusive integer range
  std::int64_t max_price = -1;
  bool proposals = false;         // bargaining
  bool accept = false;

  bool Contains(const Action& action) const;
  bool empty() const {
    return moves.empty() && max_price < min_price && !proposals && !accept;
  }
};

// Legal actions for `player`. `offer_pending` is only meaningful for
// bargaining and says whether the opponent has a standing proposal.
ActionSet LegalActions(const GameSpec& spec, int player, bool offer_pending);

// Integer price grid [0, floor(p_max)] used for Bertrand beliefs and signals.
std::vector<std::int64_t> PriceGrid(const BertrandParams& params);

}  // namespace talkgames::game

#endif  // TALKGAMES_GAME_RULES_H_
