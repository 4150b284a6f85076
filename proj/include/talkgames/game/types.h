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

#ifndef TALKGAMES_GAME_TYPES_H_
#define TALKGAMES_GAME_TYPES_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace talkgames::game {

inline constexpr int kNumPlayers = 2;

enum class GameKind { kRps, kBertrand, kBargaining };

std::string_view GameKindName(GameKind kind);
// Accepts "rps", "bertrand" and "bargaining".
GameKind ParseGameKind(std::string_view name);

enum class RpsMove { kRock = 0, kPaper = 1, kScissors = 2 };
inline constexpr RpsMove kAllRpsMoves[] = {RpsMove::kRock, RpsMove::kPaper,
                                           RpsMove::kScissors};

std::string_view RpsMoveName(RpsMove move);

// A posted Bertrand price in whole currency units.
struct Price {
  std::int64_t value = 0;
  friend bool operator==(const Price&, const Price&) = default;
};

// Bargaining offer; the unit price is carried in cents so that two-decimal
// prices round-trip exactly.
struct Proposal {
  int units = 1;
  std::int64_t price_cents = 0;

  double unit_price() const { return static_cast<double>(price_cents) / 100.0; }
  friend bool operator==(const Proposal&, const Proposal&) = default;
};

// Accepts the opponent's most recent proposal.
struct Accept {
  friend bool operator==(const Accept&, const Accept&) = default;
};

using Action = std::variant<RpsMove, Price, Proposal, Accept>;

// Rounds a currency amount to cents, half away from zero.
std::int64_t ToCents(double amount);

struct BertrandParams {
  std::string product = "widgets";
  double cost = 70.0;
  double demand_slope = 0.2;  // d: demand is (p_max - p) / d
  double p_max = 300.0;
  int rounds = 5;
};

struct BargainingParams {
  std::string product = "widgets";
  double cost = 40.0;
  double value = 250.0;
};

struct GameSpec {
  GameKind kind = GameKind::kRps;
  // Maximum turns per player (the prompt's {max_interact}).
  int max_interactions = 5;
  // When set, `constrained_player` may not play paper.
  bool rps_constrained = false;
  int constrained_player = 1;
  // Which player index acts as the seller in bargaining; the other buys.
  int seller_player = 0;
  BertrandParams bertrand;
  BargainingParams bargaining;

  // Throws InvalidSpec when an invariant does not hold.
  void Validate() const;

  static GameSpec Rps(bool constrained = false);
  static GameSpec Bertrand(BertrandParams params);
  static GameSpec Bargaining(BargainingParams params);
};

struct UtilityPair {
  double self = 0.0;
  double other = 0.0;

  UtilityPair Swapped() const { return {other, self}; }
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoSurplus : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace talkgames::game

#endif  // TALKGAMES_GAME_TYPES_H_
