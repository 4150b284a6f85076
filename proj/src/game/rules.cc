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

#include "talkgames/game/rules.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace talkgames::game {

std::string_view GameKindName(GameKind kind) {
  switch (kind) {
    case GameKind::kRps:
      return "rps";
    case GameKind::kBertrand:
      return "bertrand";
    case GameKind::kBargaining:
      return "bargaining";
  }
  return "unknown";
}

GameKind ParseGameKind(std::string_view name) {
  if (name == "rps") return GameKind::kRps;
  if (name == "bertrand") return GameKind::kBertrand;
  if (name == "bargaining") return GameKind::kBargaining;
  throw InvalidSpec("unknown game kind '" + std::string(name) + "'");
}

std::string_view RpsMoveName(RpsMove move) {
  switch (move) {
    case RpsMove::kRock:
      return "rock";
    case RpsMove::kPaper:
      return "paper";
    case RpsMove::kScissors:
      return "scissors";
  }
  return "unknown";
}

std::int64_t ToCents(double amount) {
  // The epsilon absorbs binary representation error such as 8.335 being
  // stored as 8.33499999...
  const double scaled = amount * 100.0;
  return static_cast<std::int64_t>(
      scaled >= 0 ? std::floor(scaled + 0.5 + 1e-9)
                  : -std::floor(-scaled + 0.5 + 1e-9));
}

void GameSpec::Validate() const {
  if (max_interactions < 1) throw InvalidSpec("max_interactions must be >= 1");
  if (constrained_player < 0 || constrained_player >= kNumPlayers)
    throw InvalidSpec("constrained_player out of range");
  if (seller_player < 0 || seller_player >= kNumPlayers)
    throw InvalidSpec("seller_player out of range");
  switch (kind) {
    case GameKind::kRps:
      break;
    case GameKind::kBertrand: {
      const auto& b = bertrand;
      if (!(b.cost > 0)) throw InvalidSpec("bertrand cost must be > 0");
      if (!(b.p_max > b.cost)) throw InvalidSpec("bertrand p_max must exceed cost");
      if (!(b.demand_slope > 0)) throw InvalidSpec("bertrand d must be > 0");
      if (b.rounds < 1) throw InvalidSpec("bertrand rounds must be >= 1");
      break;
    }
    case GameKind::kBargaining: {
      const auto& b = bargaining;
      if (!(b.cost > 0)) throw InvalidSpec("bargaining cost must be > 0");
      if (!(b.value > b.cost)) throw InvalidSpec("bargaining value must exceed cost");
      break;
    }
  }
}

GameSpec GameSpec::Rps(bool constrained) {
  GameSpec spec;
  spec.kind = GameKind::kRps;
  spec.rps_constrained = constrained;
  return spec;
}

GameSpec GameSpec::Bertrand(BertrandParams params) {
  GameSpec spec;
  spec.kind = GameKind::kBertrand;
  spec.bertrand = std::move(params);
  return spec;
}

GameSpec GameSpec::Bargaining(BargainingParams params) {
  GameSpec spec;
  spec.kind = GameKind::kBargaining;
  spec.bargaining = std::move(params);
  return spec;
}

bool RpsBeats(RpsMove a, RpsMove b) {
  return (a == RpsMove::kRock && b == RpsMove::kScissors) ||
         (a == RpsMove::kScissors && b == RpsMove::kPaper) ||
         (a == RpsMove::kPaper && b == RpsMove::kRock);
}

RpsMove RpsCounter(RpsMove move) {
  switch (move) {
    case RpsMove::kRock:
      return RpsMove::kPaper;
    case RpsMove::kPaper:
      return RpsMove::kScissors;
    case RpsMove::kScissors:
      return RpsMove::kRock;
  }
  return RpsMove::kRock;
}

UtilityPair RpsPayoff(RpsMove a, RpsMove b) {
  if (a == b) return {1.0, 1.0};
  return RpsBeats(a, b) ? UtilityPair{2.0, 0.0} : UtilityPair{0.0, 2.0};
}

double BertrandDemand(double price, const BertrandParams& params) {
  return std::max(0.0, (params.p_max - price) / params.demand_slope);
}

UtilityPair BertrandRoundPayoff(std::int64_t price_a, std::int64_t price_b,
                                const BertrandParams& params) {
  const auto profit = [&](std::int64_t p) {
    const double price = static_cast<double>(p);
    return (price - params.cost) * BertrandDemand(price, params);
  };
  if (price_a < price_b) return {profit(price_a), 0.0};
  if (price_b < price_a) return {0.0, profit(price_b)};
  const double half = profit(price_a) / 2.0;
  return {half, half};
}

MonopolyOutcome BertrandMonopoly(const BertrandParams& params) {
  const double margin = params.p_max - params.cost;
  return {(params.cost + params.p_max) / 2.0,
          margin * margin / (4.0 * params.demand_slope)};
}

double Harmonic(int n) {
  if (n < 1) throw std::invalid_argument("Harmonic requires n >= 1");
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) sum += 1.0 / k;
  return sum;
}

UtilityPair BargainingUtilities(const std::optional<Proposal>& deal,
                                const BargainingParams& params) {
  if (!deal) return {0.0, 0.0};
  const double n = deal->units;
  const double p = deal->unit_price();
  return {(p - params.cost) * n, params.value * Harmonic(deal->units) - p * n};
}

NashBargain BargainingNashSolution(const BargainingParams& params) {
  if (!(params.value > params.cost)) {
    throw NoSurplus("bargaining value must exceed cost");
  }
  const int n = static_cast<int>(std::floor(params.value / params.cost));
  return {n, (params.value * Harmonic(n) / n + params.cost) / 2.0};
}

bool ActionSet::Contains(const Action& action) const {
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RpsMove>) {
          return std::find(moves.begin(), moves.end(), a) != moves.end();
        } else if constexpr (std::is_same_v<T, Price>) {
          return a.value >= min_price && a.value <= max_price;
        } else if constexpr (std::is_same_v<T, Proposal>) {
          return proposals && a.units >= 1 && a.price_cents >= 0;
        } else {
          return accept;
        }
      },
      action);
}

ActionSet LegalActions(const GameSpec& spec, int player, bool offer_pending) {
  ActionSet set;
  switch (spec.kind) {
    case GameKind::kRps:
      for (RpsMove m : kAllRpsMoves) {
        if (spec.rps_constrained && player == spec.constrained_player &&
            m == RpsMove::kPaper) {
          continue;
        }
        set.moves.push_back(m);
      }
      break;
    case GameKind::kBertrand:
      set.min_price = 0;
      set.max_price = std::numeric_limits<std::int64_t>::max();
      break;
    case GameKind::kBargaining:
      set.proposals = true;
      set.accept = offer_pending;
      break;
  }
  return set;
}

std::vector<std::int64_t> PriceGrid(const BertrandParams& params) {
  const auto top = static_cast<std::int64_t>(std::floor(params.p_max));
  std::vector<std::int64_t> grid;
  grid.reserve(static_cast<std::size_t>(top + 1));
  for (std::int64_t p = 0; p <= top; ++p) grid.push_back(p);
  return grid;
}

}  // namespace talkgames::game
